"""Block partitions, Schur complements and the block determinant identities.

Only symmetric block matrices ``[[A, B], [B^T, D]]`` are handled.  A k-block
partition is always treated as nested 2x2 splits: first block against the
rest.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .dense import (
    MatrixLike,
    SpdMatrix,
    SymMatrix,
    as_spd,
    as_sym,
    cholesky,
    identity,
    invert,
    lu_log_det,
    psd_sqrt,
)
from .errors import DimensionMismatch, NotPositiveDefinite, WoodburySkipped


@dataclass(frozen=True)
class BlockPartition:
    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError(f"block sizes must be positive and non-empty, got {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def total(self) -> int:
        return sum(self.sizes)

    @property
    def offsets(self) -> tuple[int, ...]:
        """Start index of each block, followed by ``total``."""
        return tuple(np.concatenate([[0], np.cumsum(self.sizes)]).tolist())

    def slice(self, i: int) -> slice:
        off = self.offsets
        return slice(off[i], off[i + 1])

    def tail(self) -> "BlockPartition":
        """Partition of the trailing submatrix left after removing block 0."""
        return BlockPartition(self.sizes[1:])


@dataclass(frozen=True, eq=False)
class BlockView:
    parent_n: int
    partition: BlockPartition
    i: int
    j: int
    block: np.ndarray


def block_diag(blocks: Sequence[MatrixLike]) -> SymMatrix:
    if len(blocks) == 0:
        raise ValueError("block_diag needs at least one block")
    mats = [as_sym(b).entries for b in blocks]
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n))
    off = 0
    for m in mats:
        k = m.shape[0]
        out[off:off + k, off:off + k] = m
        off += k
    return SymMatrix(out)


def _check_partition(a: SymMatrix, p: BlockPartition) -> None:
    if p.total != a.n:
        raise DimensionMismatch(f"partition {p.sizes} sums to {p.total}, matrix is {a.n}x{a.n}")


def extract_blocks(a: MatrixLike, p: BlockPartition) -> list[list[BlockView]]:
    a = as_sym(a)
    _check_partition(a, p)
    grid = []
    for i in range(p.k):
        row = []
        for j in range(p.k):
            blk = np.array(a.entries[p.slice(i), p.slice(j)])
            blk.setflags(write=False)
            row.append(BlockView(a.n, p, i, j, blk))
        grid.append(row)
    return grid


def reassemble(grid: Sequence[Sequence[BlockView]]) -> SymMatrix:
    return SymMatrix(np.block([[v.block for v in row] for row in grid]))


def diagonal_blocks(a: MatrixLike, p: BlockPartition) -> list[SymMatrix]:
    a = as_sym(a)
    _check_partition(a, p)
    return [SymMatrix(a.entries[p.slice(i), p.slice(i)]) for i in range(p.k)]


def split2(m: MatrixLike, split: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return the (A, B, D) blocks of ``m = [[A, B], [B^T, D]]``."""
    m = as_sym(m)
    if not 1 <= split < m.n:
        raise ValueError(f"split must satisfy 1 <= split < {m.n}, got {split}")
    e = m.entries
    return e[:split, :split], e[:split, split:], e[split:, split:]


def schur_complement(m: MatrixLike, split: int) -> SymMatrix:
    """S_A = D - B^T A^{-1} B for the 2x2 split of ``m`` after ``split`` rows."""
    A, B, D = split2(m, split)
    try:
        a = cholesky(A)
    except NotPositiveDefinite as exc:
        raise RuntimeError("leading block of an SPD matrix failed the SPD check") from exc
    # B^T A^{-1} B = (L^{-1} B)^T (L^{-1} B)
    X = solve_triangular(a.chol, B, lower=True)
    return SymMatrix(D - X.T @ X)


def block_inverse_2x2(m: MatrixLike, split: int) -> SymMatrix:
    """Assemble m^{-1} blockwise from A^{-1} and the inverse of S_A."""
    A, B, _ = split2(m, split)
    a_inv = invert(A).entries
    s_inv = invert(schur_complement(m, split)).entries
    ab = a_inv @ B
    top_left = a_inv + ab @ s_inv @ ab.T
    top_right = -ab @ s_inv
    return SymMatrix(np.block([[top_left, top_right], [top_right.T, s_inv]]))


def woodbury_residual(m: MatrixLike, split: int) -> float:
    """max|(A - B D^{-1} B^T)^{-1} - (A^{-1} + A^{-1} B S_A^{-1} B^T A^{-1})|.

    Raises WoodburySkipped when A - B D^{-1} B^T does not pass the SPD check.
    """
    A, B, D = split2(m, split)
    s_d = SymMatrix(A - B @ invert(D).entries @ B.T)
    try:
        lhs = invert(cholesky(s_d)).entries
    except NotPositiveDefinite as exc:
        raise WoodburySkipped(str(exc)) from exc
    a_inv = invert(A).entries
    s_inv = invert(schur_complement(m, split)).entries
    ab = a_inv @ B
    rhs = a_inv + ab @ s_inv @ ab.T
    return float(np.max(np.abs(lhs - rhs)))


def sylvester_logdets(m: MatrixLike, aux: Optional[MatrixLike] = None) -> tuple[float, float]:
    """(log det(I + XY), log det(I + YX)) with X = m sqrt(aux), Y = sqrt(aux).

    I + XY = I + m aux is not symmetric and goes through LU; I + YX is SPD
    and goes through Cholesky.  ``aux`` defaults to the identity.
    """
    m = as_sym(m)
    aux = identity(m.n) if aux is None else as_sym(aux)
    if aux.n != m.n:
        raise DimensionMismatch(f"aux is {aux.n}x{aux.n}, matrix is {m.n}x{m.n}")
    root = psd_sqrt(aux).entries
    X = m.entries @ root
    Y = root
    eye = np.eye(m.n)
    return lu_log_det(eye + X @ Y), cholesky(eye + Y @ X).logdet


def sylvester_residual(m: MatrixLike, aux: Optional[MatrixLike] = None) -> float:
    xy, yx = sylvester_logdets(m, aux)
    return abs(xy - yx)


@dataclass(frozen=True)
class IdentityResiduals:
    fischer: float
    woodbury: Optional[float]  # None when the Woodbury precondition fails
    sylvester: float


def identity_residuals(m: MatrixLike, split: int, aux: Optional[MatrixLike] = None) -> IdentityResiduals:
    m = as_spd(m)
    A, _, _ = split2(m, split)
    s_a = cholesky(schur_complement(m, split))
    fischer = abs(m.logdet - cholesky(A).logdet - s_a.logdet)
    try:
        woodbury: Optional[float] = woodbury_residual(m, split)
    except WoodburySkipped:
        woodbury = None
    return IdentityResiduals(fischer, woodbury, sylvester_residual(m, aux))


def fischer_terms(m: MatrixLike, split: int) -> dict[str, float]:
    """Log-determinants entering Fischer's inequality for the split."""
    m = as_spd(m)
    A, _, D = split2(m, split)
    return {
        "logdet_m": m.logdet,
        "logdet_a": cholesky(A).logdet,
        "logdet_d": cholesky(D).logdet,
        "logdet_schur": cholesky(schur_complement(m, split)).logdet,
    }
