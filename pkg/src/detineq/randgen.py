"""Seeded random SPD/PSD matrices, theorem instances and counterexample search.

Every draw comes from a per-trial substream whose seed is
``mix(mix(seed, stream_tag), trial_index)``, so trials are independent of
execution order and can be replayed one at a time.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .blocks import BlockPartition
from .dense import SpdMatrix, SymMatrix, cholesky
from .inequalities import REL_TOL, GapReport, TheoremInstance, Variant, generalized_gap

MASK64 = (1 << 64) - 1
MAX_REDRAWS = 1000


def mix(a: int, b: int) -> int:
    """Combine two integers into a 64-bit seed (splitmix64 finalizer)."""
    z = (a * 0x9E3779B97F4A7C15 + b + 0x632BE59BD9B4E019) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_tag(name: str) -> int:
    return zlib.crc32(name.encode())


def substream_seed(seed: int, stream: Union[str, int], index: int) -> int:
    tag = stream_tag(stream) if isinstance(stream, str) else int(stream)
    return mix(mix(int(seed) & MASK64, tag), int(index))


def make_rng(substream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(substream))


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_dim: int = 32
    max_blocks: int = 5
    cond_cap: float = 1e6
    psd_rank_deficient_prob: float = 1.0 / 3.0

    def __post_init__(self) -> None:
        if not 1 <= self.max_blocks <= self.max_dim:
            raise ValueError(f"need max_dim >= max_blocks >= 1, got {self.max_dim}, {self.max_blocks}")
        if self.max_dim > 64:
            raise ValueError("max_dim is limited to 64")
        if self.max_blocks > 8:
            raise ValueError("max_blocks is limited to 8")
        if not self.cond_cap > 1:
            raise ValueError("cond_cap must exceed 1")
        if not 0.0 <= self.psd_rank_deficient_prob <= 1.0:
            raise ValueError("psd_rank_deficient_prob must lie in [0, 1]")


def spd_from_rng(rng: np.random.Generator, dim: int, cfg: GenConfig) -> SpdMatrix:
    """G G^T / dim + delta I, delta ~ U[0.1, 1], redrawn while cond > cfg.cond_cap."""
    for _ in range(MAX_REDRAWS):
        g = rng.standard_normal((dim, dim))
        delta = rng.uniform(0.1, 1.0)
        a = g @ g.T / dim + delta * np.eye(dim)
        lam = np.linalg.eigvalsh(a)
        if lam[-1] <= cfg.cond_cap * lam[0]:
            return cholesky(a)
    raise RuntimeError(f"no matrix under cond_cap={cfg.cond_cap} after {MAX_REDRAWS} draws")


def psd_from_rng(rng: np.random.Generator, dim: int, cfg: GenConfig) -> SymMatrix:
    """H H^T / dim; H has fewer than ``dim`` columns with probability cfg.psd_rank_deficient_prob."""
    if rng.uniform() < cfg.psd_rank_deficient_prob:
        rank = int(rng.integers(0, dim))
    else:
        rank = dim
    h = rng.standard_normal((dim, rank))
    return SymMatrix(h @ h.T / dim)


def random_spd(dim: int, substream: int, cfg: GenConfig) -> SpdMatrix:
    if not 1 <= dim <= cfg.max_dim:
        raise ValueError(f"dim must lie in [1, {cfg.max_dim}], got {dim}")
    return spd_from_rng(make_rng(substream_seed(cfg.seed, "spd", substream)), dim, cfg)


def random_psd(dim: int, substream: int, cfg: GenConfig) -> SymMatrix:
    if not 1 <= dim <= cfg.max_dim:
        raise ValueError(f"dim must lie in [1, {cfg.max_dim}], got {dim}")
    return psd_from_rng(make_rng(substream_seed(cfg.seed, "psd", substream)), dim, cfg)


def random_partition(rng: np.random.Generator, max_dim: int, max_blocks: int, min_blocks: int = 2) -> BlockPartition:
    """k uniform in [min_blocks, max_blocks], total uniform in [k, max_dim], cut points uniform."""
    lo = min(min_blocks, max_blocks)
    k = int(rng.integers(lo, max_blocks + 1))
    total = int(rng.integers(k, max_dim + 1))
    cuts = np.sort(rng.choice(np.arange(1, total), size=k - 1, replace=False))
    sizes = np.diff(np.concatenate([[0], cuts, [total]]))
    return BlockPartition(tuple(int(s) for s in sizes))


def random_instance(variant: Variant, cfg: GenConfig, substream: int) -> TheoremInstance:
    """Random C and block perturbations D_i, all SPD.

    The same draw serves both variants; for theorem2 the blocks C_i are
    derived from C by the gap computation.
    """
    if variant not in ("theorem1", "theorem2"):
        raise ValueError(f"unknown variant {variant!r}")
    seed = substream_seed(cfg.seed, variant, substream)
    rng = make_rng(seed)
    p = random_partition(rng, cfg.max_dim, cfg.max_blocks)
    c = spd_from_rng(rng, p.total, cfg)
    ds = tuple(spd_from_rng(rng, size, cfg) for size in p.sizes)
    return TheoremInstance(c, p, ds, seed=seed)


# Counterexamples to the generalized statements (full D instead of diag(D_i)).
KNOWN_COUNTEREXAMPLES: dict[str, tuple[list[list[float]], list[list[float]]]] = {
    "theorem1": ([[10.0, 2.0], [2.0, 5.0]], [[2.0, 1.0], [1.0, 1.0]]),
    "theorem2": ([[2.0, -2.0], [-2.0, 4.0]], [[1.0, 1.0], [1.0, 2.0]]),
}


@dataclass(frozen=True, eq=False)
class SearchResult:
    found: bool
    variant: Variant
    c: Optional[SpdMatrix]
    d: Optional[SpdMatrix]
    partition: Optional[BlockPartition]
    gap: float
    trials_used: int
    report: Optional[GapReport] = None


def search_counterexample(
    variant: Variant,
    cfg: GenConfig,
    max_trials: int,
    seeds_enabled: bool = True,
    rel_tol: float = REL_TOL,
) -> SearchResult:
    """Look for (C, D) with full SPD D that violates the generalized inequality.

    With ``seeds_enabled`` the known 2x2 counterexample is tried first and
    always hits.  Otherwise trials draw random C, D of random dimension in
    [2, cfg.max_dim] and a random partition of it.
    """
    if max_trials < 1:
        raise ValueError("max_trials must be at least 1")
    if variant not in KNOWN_COUNTEREXAMPLES:
        raise ValueError(f"unknown variant {variant!r}")
    if seeds_enabled:
        c_raw, d_raw = KNOWN_COUNTEREXAMPLES[variant]
        c, d, p = cholesky(c_raw), cholesky(d_raw), BlockPartition((1, 1))
        r = generalized_gap(c, d, p, variant, rel_tol=rel_tol)
        if not r.holds:
            return SearchResult(True, variant, c, d, p, r.gap, 1, r)
        start = 1
    else:
        start = 0
    best: Optional[GapReport] = None
    for trial in range(start, max_trials):
        seed = substream_seed(cfg.seed, f"search-{variant}", trial)
        rng = make_rng(seed)
        if cfg.max_dim < 2:
            break
        p = random_partition(rng, cfg.max_dim, cfg.max_blocks)
        c = spd_from_rng(rng, p.total, cfg)
        d = spd_from_rng(rng, p.total, cfg)
        r = generalized_gap(c, d, p, variant, seed=seed, rel_tol=rel_tol)
        if not r.holds:
            return SearchResult(True, variant, c, d, p, r.gap, trial + 1, r)
        if best is None or r.gap < best.gap:
            best = r
    return SearchResult(False, variant, None, None, None, best.gap if best else float("nan"), max_trials, best)
