"""Empirical hit rate of random counterexamples to the generalized inequalities.

For each variant and dimension, draws random (C, D) pairs with a 1+1 or
balanced two-block partition and counts how often the generalized gap is
negative beyond tolerance.  The hit rate is an observable, not a target.

    python3 scripts/counterexample_hitrate.py --trials 2000 --dims 2 4 8
"""

import argparse
from dataclasses import dataclass

from detineq.blocks import BlockPartition
from detineq.inequalities import generalized_gap
from detineq.randgen import GenConfig, make_rng, psd_from_rng, spd_from_rng, substream_seed


@dataclass(frozen=True)
class HitRateConfig:
    seed: int = 0
    trials: int = 2000
    dims: tuple = (2, 4, 8)
    variants: tuple = ("theorem1", "theorem2")


def hit_rate(variant: str, dim: int, cfg: HitRateConfig) -> tuple[int, float]:
    gen = GenConfig(seed=cfg.seed, max_dim=max(dim, 2), max_blocks=2, psd_rank_deficient_prob=0.0)
    partition = BlockPartition((dim // 2, dim - dim // 2))
    hits, worst = 0, 0.0
    for i in range(cfg.trials):
        rng = make_rng(substream_seed(cfg.seed, f"hitrate-{variant}-{dim}", i))
        c = spd_from_rng(rng, dim, gen)
        d = psd_from_rng(rng, dim, gen)
        r = generalized_gap(c, d, partition, variant)
        if not r.holds:
            hits += 1
        worst = min(worst, r.gap)
    return hits, worst


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 4, 8])
    args = ap.parse_args()
    cfg = HitRateConfig(seed=args.seed, trials=args.trials, dims=tuple(args.dims))
    print(f"{'variant':<10} {'dim':>4} {'hits':>6} {'rate':>8} {'min gap':>12}")
    for variant in cfg.variants:
        for dim in cfg.dims:
            hits, worst = hit_rate(variant, dim, cfg)
            print(f"{variant:<10} {dim:>4} {hits:>6} {hits / cfg.trials:>8.3%} {worst:>12.4e}")


if __name__ == "__main__":
    main()
