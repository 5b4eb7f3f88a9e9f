"""Discretized super-additivity of f(t) = log E exp(-int_0^t W(Z(s))^2 ds).

For a fixed outer path Z sampled on the grid s_1 < ... < s_{n+m}, the vector
(W(Z(s_i)))_i is Gaussian with covariance C built from the two-sided Brownian
kernel.  With Lambda = diag(lambda1 I_n, lambda2 I_m),

    E exp(-w^T Lambda w) = det(I + 2 Lambda C)^{-1/2},

so each discretized log-expectation is a log-determinant and the gap
f_full - f_1 - f_2 is non-negative for every path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .blocks import BlockPartition, diagonal_blocks
from .dense import SpdMatrix, cholesky
from .inequalities import REL_TOL, GapReport, equivalent_form_gap, fingerprint, tolerance
from .randgen import make_rng, substream_seed

JITTER = 1e-10


@dataclass(frozen=True)
class GridSpec:
    t1: float
    t2: float
    n: int
    m: int

    def __post_init__(self) -> None:
        if not (self.t1 > 0 and self.t2 > 0):
            raise ValueError(f"t1 and t2 must be positive, got {self.t1}, {self.t2}")
        if self.n < 1 or self.m < 1:
            raise ValueError(f"n and m must be at least 1, got {self.n}, {self.m}")

    @property
    def lambda1(self) -> float:
        return self.t1 / self.n

    @property
    def lambda2(self) -> float:
        return self.t2 / self.m

    @property
    def partition(self) -> BlockPartition:
        return BlockPartition((self.n, self.m))

    def nodes(self) -> np.ndarray:
        """Grid times s_1, ..., s_{n+m} (s_0 = 0 excluded)."""
        first = self.lambda1 * np.arange(1, self.n + 1)
        second = self.t1 + self.lambda2 * np.arange(1, self.m + 1)
        second[-1] = self.t1 + self.t2
        first[-1] = self.t1
        return np.concatenate([first, second])


@dataclass(frozen=True, eq=False)
class PathInstance:
    z: np.ndarray
    grid: GridSpec
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        z = np.array(self.z, dtype=np.float64).reshape(-1)
        if z.size != self.grid.n + self.grid.m:
            raise ValueError(f"expected {self.grid.n + self.grid.m} path values, got {z.size}")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)


@dataclass(frozen=True)
class SuperaddReport:
    gap: float
    f_full: float
    f_1: float
    f_2: float
    tol: float
    fingerprint: str

    @property
    def holds(self) -> bool:
        return self.gap >= -self.tol


def sample_path(grid: GridSpec, substream: int, seed: int = 0) -> PathInstance:
    """z_i = z_{i-1} + sqrt(s_i - s_{i-1}) xi_i with z_0 = 0, xi_i standard normal."""
    sub = substream_seed(seed, "brownian", substream)
    rng = make_rng(sub)
    s = grid.nodes()
    steps = np.diff(np.concatenate([[0.0], s]))
    z = np.cumsum(np.sqrt(steps) * rng.standard_normal(s.size))
    return PathInstance(z, grid, seed=sub)


def covariance_from_path(path: PathInstance) -> SpdMatrix:
    """Cov(W(z_i), W(z_j)) = min(|z_i|, |z_j|) if z_i z_j > 0 else 0, plus jitter.

    The kernel matrix is PSD but singular for repeated or zero z values;
    adding ``JITTER * (1 + max|z|)`` to the diagonal makes it SPD.
    """
    z = path.z
    same_sign = np.outer(z, z) > 0
    k = np.where(same_sign, np.minimum.outer(np.abs(z), np.abs(z)), 0.0)
    jitter = JITTER * (1.0 + float(np.max(np.abs(z))))
    return cholesky(k + jitter * np.eye(z.size))


def superadditivity_gap(
    path: PathInstance,
    lambda_scale: float = 1.0,
    factor: float = 2.0,
    rel_tol: float = REL_TOL,
) -> SuperaddReport:
    """f_full - f_1 - f_2 for one outer path.

    f_full = -1/2 log det(I + factor Lambda C), and f_1, f_2 use the diagonal
    blocks of C with lambda1, lambda2.  ``factor = 2`` is the Gaussian
    density exp(-1/2 w^T C^{-1} w); ``factor = 1`` drops the 1/2.
    ``lambda_scale`` multiplies both segment lengths.
    """
    grid = path.grid
    c = covariance_from_path(path)
    l1 = factor * lambda_scale * grid.lambda1
    l2 = factor * lambda_scale * grid.lambda2
    weights = np.concatenate([np.full(grid.n, l1), np.full(grid.m, l2)])
    # I + Lambda C is similar to the SPD matrix I + Lambda^{1/2} C Lambda^{1/2}
    r = np.sqrt(weights)
    f_full = -0.5 * cholesky(np.eye(c.n) + r[:, None] * c.entries * r[None, :]).logdet
    c1, c2 = diagonal_blocks(c, grid.partition)
    f_1 = -0.5 * cholesky(np.eye(grid.n) + l1 * c1.entries).logdet
    f_2 = -0.5 * cholesky(np.eye(grid.m) + l2 * c2.entries).logdet
    gap = f_full - (f_1 + f_2)
    tol = tolerance(f_full, f_1 + f_2, rel_tol)
    return SuperaddReport(gap, f_full, f_1, f_2, tol, fingerprint(c, seed=path.seed))


def equivalent_form_check(path: PathInstance, lambda_scale: float = 1.0, factor: float = 2.0) -> GapReport:
    """The same instance evaluated as the B = C equivalent form with D_i = factor * lambda_i * I.

    Its gap equals twice the super-additivity gap.
    """
    grid = path.grid
    c = covariance_from_path(path)
    d1 = factor * lambda_scale * grid.lambda1 * np.eye(grid.n)
    d2 = factor * lambda_scale * grid.lambda2 * np.eye(grid.m)
    return equivalent_form_gap(c, grid.partition, [d1, d2], fp=fingerprint(c, seed=path.seed))


def monte_carlo_f(grid_t: float, steps: int, paths: int, seed: int = 0, factor: float = 2.0) -> float:
    """Rough estimate of f(t) = log E_Z E_W exp(-int_0^t W(Z(s))^2 ds) on a uniform grid.

    Averages the closed-form inner expectation over sampled outer paths.
    For illustration only.
    """
    lam = grid_t / steps
    vals = np.empty(paths)
    for i in range(paths):
        rng = make_rng(substream_seed(seed, "brownian-mc", i))
        z = np.cumsum(np.sqrt(lam) * rng.standard_normal(steps))
        same_sign = np.outer(z, z) > 0
        k = np.where(same_sign, np.minimum.outer(np.abs(z), np.abs(z)), 0.0)
        vals[i] = -0.5 * cholesky(np.eye(steps) + factor * lam * k).logdet
    top = vals.max()
    return float(top + np.log(np.mean(np.exp(vals - top))))
