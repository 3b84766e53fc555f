import numpy as np
import pytest

from saptkit.tensors import sym_v4


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_dimer(rng, n_a, n_b, s_scale=0.5):
    """Random four-fold-symmetric Coulomb tensor and bounded overlap."""
    v = sym_v4(rng.normal(size=(n_a, n_a, n_b, n_b)))
    s = rng.normal(size=(n_a, n_b))
    s = s_scale * s / max(1.0, np.abs(s).max())
    return v, s


def random_sector_state(space, which, n_elec, rng, sz=None):
    idx = space.sector_indices(which, n_elec, sz)
    dim = space.dim_A if which == "A" else space.dim_B
    vec = np.zeros(dim, dtype=complex)
    vals = rng.normal(size=len(idx))
    vec[idx] = vals / np.linalg.norm(vals)
    return vec
