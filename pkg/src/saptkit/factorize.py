"""Two-step tensor factorization with deterministic conventions.

Every four-index coefficient block is reshaped to a matrix over grouped index
pairs and decomposed exactly (eigendecomposition when the grouped matrix is
symmetric, SVD otherwise); each resulting vector is reshaped and decomposed
again the same way.  Factors are ordered by descending magnitude with a fixed
sign convention (largest-magnitude entry of each vector positive, ties broken
by lowest index), so identical input yields identical output across runs and
platforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ShapeError, SymmetryError
from .tensors import SaptCoefficients

RANK_CUTOFF = 1e-12
SYM_TOL = 1e-10

# grouped-matrix layout per block label: axes permutation bringing the stored
# tensor to [row-pair, col-pair] order, plus which monomer each grouped index
# of the row/col pair belongs to ('A' or 'B')
_BLOCK_LAYOUT = {
    "v": ((0, 1, 2, 3), "AA", "BB"),
    "exch": ((0, 1, 2, 3), "AA", "BB"),
    "A2": ((0, 1, 2, 3), "AA", "AA"),
    "B2": ((0, 1, 2, 3), "BB", "BB"),
    "1m": ((0, 1, 2, 3), "AA", "BB"),
    # locked block stored [p1,p2,q1,q2]; grouped matrix pairs (p1,q2) x (p2,q1)
    "1l": ((0, 3, 1, 2), "AB", "AB"),
    # overlap-carrying blocks keep their extra factor outside the grouping
    "2": ((0, 1, 2, 3), "AA", "BA"),
    "2r": ((0, 1, 2, 3), "AA", "BA"),
    "3": ((0, 1, 2, 3), "AB", "BB"),
    "3r": ((0, 1, 2, 3), "AB", "BB"),
}


def _fix_sign_columns(u: np.ndarray, v: np.ndarray | None = None):
    """Largest-magnitude entry of each column of u made positive."""
    for k in range(u.shape[1]):
        col = u[:, k]
        mags = np.abs(col)
        top = mags.max()
        if top == 0.0:
            continue
        lead = int(np.nonzero(mags >= top - 1e-12 * top)[0][0])
        if col[lead] < 0:
            u[:, k] = -col
            if v is not None:
                v[:, k] = -v[:, k]
    return u, v


def _order_descending(vals: np.ndarray, *mats: np.ndarray):
    order = np.argsort(-np.abs(vals), kind="stable")
    return vals[order], tuple(m[:, order] for m in mats)


@dataclass
class Factorization:
    """Exact decomposition of a real matrix: m = left @ diag(values) @ right.T."""

    values: np.ndarray
    left: np.ndarray
    right: np.ndarray
    symmetric: bool

    @property
    def rank(self) -> int:
        return len(self.values)

    def reconstruct(self) -> np.ndarray:
        return (self.left * self.values) @ self.right.T

    def truncated(self, keep: int) -> "Factorization":
        keep = max(1, keep) if self.rank else 0
        return Factorization(
            self.values[:keep], self.left[:, :keep], self.right[:, :keep], self.symmetric
        )


def decompose_matrix(m: np.ndarray, symmetric: bool | None = None) -> Factorization:
    """Spectral or singular decomposition with the deterministic conventions.

    ``symmetric=None`` auto-detects; asserting a symmetry the matrix does not
    have raises :class:`SymmetryError`.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ShapeError("decompose_matrix expects a matrix")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix contains NaN or Inf")
    scale = np.abs(m).max()
    if scale == 0.0:
        empty = np.zeros((m.shape[0], 0))
        return Factorization(np.zeros(0), empty, np.zeros((m.shape[1], 0)), True)
    is_sym = m.shape[0] == m.shape[1] and np.abs(m - m.T).max() <= SYM_TOL * scale
    if symmetric is True and not is_sym:
        raise SymmetryError("matrix asserted symmetric but is not")
    if symmetric is None:
        symmetric = is_sym

    if symmetric:
        vals, vecs = np.linalg.eigh(0.5 * (m + m.T))
        keep = np.abs(vals) > RANK_CUTOFF * scale
        vals, vecs = vals[keep], vecs[:, keep]
        vals, (vecs,) = _order_descending(vals, vecs)
        vecs = np.ascontiguousarray(vecs)
        _fix_sign_columns(vecs)
        return Factorization(vals, vecs, vecs, True)

    u, s, vt = np.linalg.svd(m, full_matrices=False)
    keep = s > RANK_CUTOFF * scale
    u, s, v = u[:, keep], s[keep], vt[keep].T
    u, v = np.ascontiguousarray(u), np.ascontiguousarray(v)
    _fix_sign_columns(u, v)
    return Factorization(s, u, v, False)


def one_body_eigendecompose(m: np.ndarray) -> Factorization:
    """Spectral decomposition of a symmetric one-body tensor."""
    m = np.asarray(m, dtype=float)
    scale = np.abs(m).max()
    if scale and np.abs(m - m.T).max() > SYM_TOL * scale:
        raise SymmetryError("one-body tensor is not symmetric")
    return decompose_matrix(m, symmetric=True)


def overlap_svd(s: np.ndarray) -> Factorization:
    """SVD of the rectangular intermolecular overlap matrix."""
    fact = decompose_matrix(np.asarray(s, dtype=float), symmetric=False)
    if fact.rank > min(s.shape):
        raise ShapeError("overlap rank exceeded its bound")
    return fact


@dataclass
class BlockFactors:
    """Nested factorization of one four-index coefficient block."""

    label: str
    shape: tuple[int, int, int, int]
    outer: Factorization
    inner_left: list[Factorization] = field(default_factory=list)
    inner_right: list[Factorization] = field(default_factory=list)
    discarded_weight: float = 0.0

    @property
    def row_shape(self) -> tuple[int, int]:
        perm, _, _ = _BLOCK_LAYOUT[self.label]
        n = [self.shape[p] for p in perm]
        return n[0], n[1]

    @property
    def col_shape(self) -> tuple[int, int]:
        perm, _, _ = _BLOCK_LAYOUT[self.label]
        n = [self.shape[p] for p in perm]
        return n[2], n[3]


def first_factorize(block: np.ndarray, label: str, symmetric: bool | None = None) -> BlockFactors:
    """Grouped-matrix decomposition of one block (no truncation)."""
    perm, _, _ = _BLOCK_LAYOUT[label]
    t = np.transpose(np.asarray(block, dtype=float), perm)
    n1, n2, n3, n4 = t.shape
    outer = decompose_matrix(t.reshape(n1 * n2, n3 * n4), symmetric=symmetric)
    return BlockFactors(label=label, shape=block.shape, outer=outer)


def second_factorize(bf: BlockFactors) -> BlockFactors:
    """Decompose every grouped vector of the first step."""
    r1, r2 = bf.row_shape
    c1, c2 = bf.col_shape
    bf.inner_left = [
        decompose_matrix(bf.outer.left[:, t].reshape(r1, r2)) for t in range(bf.outer.rank)
    ]
    if bf.outer.symmetric:
        bf.inner_right = bf.inner_left
    else:
        bf.inner_right = [
            decompose_matrix(bf.outer.right[:, t].reshape(c1, c2)) for t in range(bf.outer.rank)
        ]
    return bf


def factorize_block(block: np.ndarray, label: str, symmetric: bool | None = None) -> BlockFactors:
    return second_factorize(first_factorize(block, label, symmetric))


def reconstruct_block(bf: BlockFactors) -> np.ndarray:
    """Assemble the block back from its nested factors."""
    r1, r2 = bf.row_shape
    c1, c2 = bf.col_shape
    perm, _, _ = _BLOCK_LAYOUT[bf.label]
    m = np.zeros((r1 * r2, c1 * c2))
    for t in range(bf.outer.rank):
        u = bf.inner_left[t].reconstruct().reshape(r1 * r2)
        w = bf.inner_right[t].reconstruct().reshape(c1 * c2)
        m += bf.outer.values[t] * np.outer(u, w)
    t4 = m.reshape(r1, r2, c1, c2)
    inv = np.argsort(perm)
    return np.transpose(t4, inv)


def truncate_block(bf: BlockFactors, threshold: float) -> BlockFactors:
    """Drop trailing factors whose cumulative weight is below threshold.

    Applied to the outer coefficients and to every inner factor list; a
    nonzero block always keeps at least one factor per level.  The discarded
    outer weight is recorded (a bound on the reconstruction error scale, not
    asserted).
    """
    if not 0.0 <= threshold < 1.0:
        raise DomainError("truncation threshold must lie in [0, 1)")
    if threshold == 0.0 or bf.outer.rank == 0:
        return bf

    def keep_count(vals: np.ndarray) -> int:
        weights = np.abs(vals)
        total = weights.sum()
        if total == 0.0:
            return len(vals)
        tail = np.cumsum(weights[::-1])[::-1]
        keep = int(np.sum(tail > threshold * total))
        return max(1, keep)

    keep = keep_count(bf.outer.values)
    discarded = float(np.abs(bf.outer.values[keep:]).sum())
    shared = bf.inner_right is bf.inner_left
    out = BlockFactors(label=bf.label, shape=bf.shape, outer=bf.outer.truncated(keep))
    out.inner_left = [f.truncated(keep_count(f.values)) for f in bf.inner_left[:keep]]
    if shared:
        out.inner_right = out.inner_left
    else:
        out.inner_right = [f.truncated(keep_count(f.values)) for f in bf.inner_right[:keep]]
    # inner drops enter the error bound scaled by their outer coefficient
    for t in range(keep):
        s_t = abs(bf.outer.values[t])
        discarded += s_t * float(
            np.abs(bf.inner_left[t].values[out.inner_left[t].rank :]).sum()
        )
        if not shared:
            discarded += s_t * float(
                np.abs(bf.inner_right[t].values[out.inner_right[t].rank :]).sum()
            )
    out.discarded_weight = bf.discarded_weight + discarded
    return out


@dataclass
class FactorizedOperator:
    """All decompositions needed to evaluate one observable's norms."""

    observable: str
    space_tag: str
    blocks: dict[str, BlockFactors] = field(default_factory=dict)
    one_body: dict[str, Factorization] = field(default_factory=dict)
    overlap: Factorization | None = None
    threshold: float = 0.0

    @property
    def lambda_s(self) -> float:
        return float(np.abs(self.overlap.values).sum()) if self.overlap is not None else 0.0

    def discarded_weight(self) -> float:
        return sum(bf.discarded_weight for bf in self.blocks.values())


_VP_BLOCK_LABELS = ("A2", "B2", "1m", "1l", "2", "3", "2r", "3r", "v")


def factorize_coefficients(
    coeffs: SaptCoefficients, threshold: float = 0.0
) -> FactorizedOperator:
    """Factorize every block and one-body tensor of a coefficient set."""
    out = FactorizedOperator(observable=coeffs.observable, space_tag=coeffs.space_tag)
    if coeffs.observable == "V":
        out.one_body["f_A"] = one_body_eigendecompose(coeffs.one_body_A)
        out.one_body["f_B"] = one_body_eigendecompose(coeffs.one_body_B)
        out.blocks["v"] = factorize_block(coeffs.two_body_blocks["v"], "v")
    elif coeffs.observable == "P":
        out.one_body["p_A"] = one_body_eigendecompose(coeffs.one_body_A)
        out.one_body["p_B"] = one_body_eigendecompose(coeffs.one_body_B)
        out.overlap = overlap_svd(coeffs.overlap)
    elif coeffs.observable == "VPs":
        out.one_body["kappa_A"] = one_body_eigendecompose(coeffs.one_body_A)
        out.one_body["kappa_B"] = one_body_eigendecompose(coeffs.one_body_B)
        out.one_body["p_A"] = one_body_eigendecompose(coeffs.vp4_one_body_A)
        out.one_body["p_B"] = one_body_eigendecompose(coeffs.vp4_one_body_B)
        out.overlap = overlap_svd(coeffs.overlap)
        for label in _VP_BLOCK_LABELS:
            if label in coeffs.two_body_blocks:
                out.blocks[label] = factorize_block(coeffs.two_body_blocks[label], label)
    else:
        raise DomainError(f"unknown observable {coeffs.observable!r}")
    if threshold:
        out.blocks = {k: truncate_block(bf, threshold) for k, bf in out.blocks.items()}
        out.threshold = threshold
    return out
