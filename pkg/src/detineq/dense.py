"""Dense real symmetric linear algebra.

Everything here works on small matrices (n up to about 64).  Determinants
are only ever handled as log-determinants computed from a Cholesky factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.linalg import cho_solve

from .errors import DimensionMismatch, NoConvergence, NotPositiveDefinite

PIVOT_FLOOR = 1e-12
JACOBI_TOL = 1e-12
MAX_SWEEPS = 100


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SymMatrix:
    """Dense real symmetric matrix.

    The input is symmetrized on construction as ``(a + a.T) / 2`` so the
    stored entries are exactly symmetric.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.entries, dtype=np.float64)
        if a.ndim < 2 and a.size == 1:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix has non-finite entries")
        object.__setattr__(self, "entries", _frozen(0.5 * (a + a.T)))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.entries)))

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __repr__(self) -> str:
        return f"SymMatrix(n={self.n}, entries={self.entries.tolist()!r})"


@dataclass(frozen=True, eq=False)
class SpdMatrix:
    """A symmetric positive definite matrix together with its Cholesky factor."""

    base: SymMatrix
    chol: np.ndarray
    logdet: float

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def entries(self) -> np.ndarray:
        return self.base.entries

    @property
    def max_abs(self) -> float:
        return self.base.max_abs

    def __array__(self, dtype=None, copy=None):
        return self.base.__array__(dtype)

    def __repr__(self) -> str:
        return f"SpdMatrix(n={self.n}, logdet={self.logdet!r})"


@dataclass(frozen=True, eq=False)
class EigenDecomp:
    q: np.ndarray
    lam: np.ndarray  # descending


MatrixLike = Union[SymMatrix, SpdMatrix, np.ndarray, list, float]


def as_sym(a: MatrixLike) -> SymMatrix:
    if isinstance(a, SymMatrix):
        return a
    if isinstance(a, SpdMatrix):
        return a.base
    return SymMatrix(np.asarray(a, dtype=np.float64))


def as_spd(a: MatrixLike) -> SpdMatrix:
    if isinstance(a, SpdMatrix):
        return a
    return cholesky(as_sym(a))


def identity(n: int) -> SymMatrix:
    return SymMatrix(np.eye(n))


def cholesky(a: MatrixLike) -> SpdMatrix:
    """Factor ``a = L L^T`` and validate positive definiteness.

    Raises NotPositiveDefinite if LAPACK rejects the matrix or any diagonal
    entry of L is at or below ``PIVOT_FLOOR * max(1, max|a_ij|)``.
    """
    a = as_sym(a)
    floor = PIVOT_FLOOR * max(1.0, a.max_abs)
    try:
        L = np.linalg.cholesky(a.entries)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"{a.n}x{a.n} matrix is not positive definite") from exc
    pivots = np.diag(L)
    if np.any(pivots <= floor):
        i = int(np.argmin(pivots))
        raise NotPositiveDefinite(
            f"Cholesky pivot {i} = {pivots[i]:.3e} is below the floor {floor:.3e}"
        )
    logdet = 2.0 * float(np.sum(np.log(pivots)))
    return SpdMatrix(a, _frozen(L), logdet)


def is_spd(a: MatrixLike) -> bool:
    try:
        cholesky(a)
    except NotPositiveDefinite:
        return False
    return True


def log_det(a: MatrixLike) -> float:
    return as_spd(a).logdet


def lu_log_det(x: np.ndarray) -> float:
    """Log-determinant of a general square matrix with positive determinant, via LU.

    Used where the matrix is not symmetric (e.g. I + B D) and as a second
    route independent of Cholesky.
    """
    sign, logdet = np.linalg.slogdet(np.asarray(x, dtype=np.float64))
    if sign <= 0:
        raise NotPositiveDefinite(f"determinant sign is {sign}, expected positive")
    return float(logdet)


def invert(a: MatrixLike) -> SymMatrix:
    """Inverse of an SPD matrix via two triangular solves against its factor."""
    a = as_spd(a)
    inv = cho_solve((a.chol, True), np.eye(a.n))
    return SymMatrix(inv)


@lru_cache(maxsize=None)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Pairings covering every (p, q), p < q, exactly once over n - 1 (or n) rounds.

    Pairs within a round are disjoint, so their rotations commute and can be
    applied together.
    """
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = sorted((players[i], players[m - 1 - i]))
            if q < n:
                ps.append(p)
                qs.append(q)
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1], *players[1:-1]]
    return tuple(rounds)


def sym_eigen(a: MatrixLike, max_sweeps: int = MAX_SWEEPS, tol: float = JACOBI_TOL) -> EigenDecomp:
    """Cyclic Jacobi eigendecomposition.

    Each sweep visits every pair (p, q) once, in round-robin order, until
    the Frobenius norm of the off-diagonal part is at most ``tol * ||a||_F``.
    """
    a = as_sym(a)
    n = a.n
    A = np.array(a.entries)
    V = np.eye(n)
    target = tol * np.linalg.norm(A)
    rounds = _round_robin(n)
    for _ in range(max_sweeps + 1):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= target:
            break
        for P, Q in rounds:
            apq = A[P, Q]
            live = apq != 0.0
            if not np.any(live):
                continue
            # Golub & Van Loan, sym.schur2
            tau = (A[Q, Q] - A[P, P]) / (2.0 * np.where(live, apq, 1.0))
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t = np.where(live, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            J = np.eye(n)
            J[P, P] = c
            J[Q, Q] = c
            J[P, Q] = s
            J[Q, P] = -s
            A = J.T @ A @ J
            A = 0.5 * (A + A.T)
            A[P, Q] = A[Q, P] = 0.0
            V = V @ J
    else:
        raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps (off={off:.3e})")
    lam = np.diag(A)
    order = np.argsort(-lam, kind="stable")
    return EigenDecomp(_frozen(V[:, order]), _frozen(lam[order]))


def psd_sqrt(a: MatrixLike) -> SymMatrix:
    """Symmetric square root of a PSD matrix; round-off negative eigenvalues are clipped."""
    e = sym_eigen(a)
    root = np.sqrt(np.clip(e.lam, 0.0, None))
    return SymMatrix((e.q * root) @ e.q.T)


def spd_sqrt(a: MatrixLike) -> SpdMatrix:
    return cholesky(psd_sqrt(as_spd(a)))


def loewner_cmp(a: MatrixLike, b: MatrixLike) -> float:
    """Minimum eigenvalue of ``a - b``.

    ``a >= b`` in the Loewner order at tolerance ``tol`` iff the result is at
    least ``-tol * (1 + max|a - b|)``; see ``loewner_geq``.
    """
    a, b = as_sym(a), as_sym(b)
    if a.n != b.n:
        raise DimensionMismatch(f"cannot compare {a.n}x{a.n} with {b.n}x{b.n}")
    diff = SymMatrix(a.entries - b.entries)
    return float(sym_eigen(diff).lam[-1])


def loewner_geq(a: MatrixLike, b: MatrixLike, tol: float = 1e-9) -> bool:
    a, b = as_sym(a), as_sym(b)
    scale = 1.0 + float(np.max(np.abs(a.entries - b.entries)))
    return loewner_cmp(a, b) >= -tol * scale
