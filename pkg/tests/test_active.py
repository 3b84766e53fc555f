import numpy as np
import pytest

from saptkit.active import (
    SpacePartition,
    renormalize_electrostatic,
    renormalize_exchange,
    renormalize_vp,
)
from saptkit.errors import PartitionError
from saptkit.fock import (
    FockSpace,
    assemble_electrostatic,
    assemble_exchange,
    assemble_majorana,
    assemble_vp_excitation,
    embed_with_core,
)
from saptkit.tensors import (
    build_electrostatic_coefficients,
    build_exchange_coefficients,
    build_majorana_coefficients,
    build_vp_coefficients,
)
from .conftest import random_dimer, random_sector_state


def embedding_pair(rng, part, space_full, space_act):
    psi_a = random_sector_state(space_act, "A", part.n_act_elec_A, rng)
    psi_b = random_sector_state(space_act, "B", part.n_act_elec_B, rng)
    emb_a = embed_with_core(space_full, "A", list(part.core_A), list(part.active_A), psi_a)
    emb_b = embed_with_core(space_full, "B", list(part.core_B), list(part.active_B), psi_b)
    return (psi_a, psi_b), (emb_a, emb_b)


PARTS = [
    SpacePartition.from_counts([0], [1, 2], [2], [0, 1], 4, 4),
    SpacePartition.from_counts([1], [0, 2], [0], [1, 2], 4, 4),
    SpacePartition.from_counts([2], [0, 1], [1], [2, 0], 3, 4),
]


class TestPartition:
    def test_overlap_rejected(self):
        with pytest.raises(PartitionError):
            SpacePartition((0,), (0, 1), (), (0,), 2, 2)

    def test_electron_budget(self):
        with pytest.raises(PartitionError):
            SpacePartition.from_counts([0, 1], [2], [], [0], 2, 2)

    def test_counts_from_closed_shell_cores(self):
        part = SpacePartition.from_counts([0], [1, 2], [], [0, 1], 6, 2)
        assert part.n_act_elec_A == 4 and part.n_act_elec_B == 2


class TestEmbeddingEquality:
    @pytest.mark.parametrize("part", PARTS)
    def test_frozen_core_expectations(self, rng, part):
        v, s = random_dimer(rng, 3, 3)
        space_full, space_act = FockSpace(3, 3), FockSpace(2, 2)
        (psi_a, psi_b), (emb_a, emb_b) = embedding_pair(rng, part, space_full, space_act)

        full_ops = {
            "V": assemble_electrostatic(space_full, v),
            "P": assemble_exchange(space_full, s),
            "VPs": assemble_vp_excitation(space_full, v, s),
        }
        act_ops = {
            "V": assemble_majorana(space_act, renormalize_electrostatic(v, part)),
            "P": assemble_majorana(space_act, renormalize_exchange(s, part)),
            "VPs": assemble_majorana(space_act, renormalize_vp(v, s, part)),
        }
        tol = {"V": 1e-10, "P": 1e-10, "VPs": 1e-9}
        for kind in full_ops:
            full_val = full_ops[kind].expectation_product(emb_a, emb_b).real
            act_val = act_ops[kind].expectation_product(psi_a, psi_b).real
            assert abs(full_val - act_val) < tol[kind], kind

    def test_active_operators_hermitian(self, rng):
        v, s = random_dimer(rng, 3, 3)
        part = PARTS[0]
        space_act = FockSpace(2, 2)
        for coeffs in (
            renormalize_electrostatic(v, part),
            renormalize_exchange(s, part),
            renormalize_vp(v, s, part),
        ):
            m = assemble_majorana(space_act, coeffs).to_dense()
            assert np.abs(m - m.conj().T).max() < 1e-12


class TestEmptyCoreIdentity:
    def test_blocks_bit_for_bit(self, rng):
        v, s = random_dimer(rng, 2, 3)
        part = SpacePartition.trivial(2, 3, 2, 4)
        full = build_vp_coefficients(v, s)
        act = renormalize_vp(v, s, part)
        assert act.constant == full.constant
        assert np.array_equal(act.one_body_A, full.one_body_A)
        assert np.array_equal(act.one_body_B, full.one_body_B)
        for key, block in full.two_body_blocks.items():
            assert np.array_equal(act.two_body_blocks[key], block), key
        assert "2r" not in act.two_body_blocks and "3r" not in act.two_body_blocks

    def test_exchange_and_electrostatic_reduce(self, rng):
        v, s = random_dimer(rng, 2, 2)
        part = SpacePartition.trivial(2, 2, 2, 2)
        act_v = renormalize_electrostatic(v, part)
        full_v = build_electrostatic_coefficients(v, np.zeros((2, 2)))
        assert np.array_equal(act_v.two_body_blocks["v"], full_v.two_body_blocks["v"])
        act_p = renormalize_exchange(s, part)
        full_p = build_exchange_coefficients(s)
        assert act_p.constant == pytest.approx(full_p.constant)
        assert np.allclose(act_p.one_body_A, full_p.one_body_A)


class TestDegenerateCases:
    def test_fully_frozen_is_scalar(self, rng):
        v, _ = random_dimer(rng, 2, 2)
        part = SpacePartition.from_counts([0, 1], [], [0, 1], [], 4, 4)
        coeffs = renormalize_electrostatic(v, part)
        expected = 4.0 * np.einsum("iijj->", v)
        assert coeffs.constant == pytest.approx(expected)

    def test_empty_active_shell_rejected_for_fold(self, rng):
        v, _ = random_dimer(rng, 2, 2)
        part = SpacePartition.from_counts([0], [1], [0], [1], 2, 2)
        with pytest.raises(PartitionError):
            renormalize_electrostatic(v, part)

    def test_zero_overlap_gives_zero_active_exchange(self, rng):
        v, _ = random_dimer(rng, 3, 3)
        s = np.zeros((3, 3))
        part = PARTS[0]
        space_act = FockSpace(2, 2)
        p_op = assemble_majorana(space_act, renormalize_exchange(s, part))
        vp_op = assemble_majorana(space_act, renormalize_vp(v, s, part))
        assert p_op.norm_estimate(rng) < 1e-14
        assert vp_op.norm_estimate(rng) < 1e-14
