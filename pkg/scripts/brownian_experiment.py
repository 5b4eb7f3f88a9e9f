"""Discretized Brownian super-additivity experiment.

Prints per-grid statistics of the pathwise gap f_full - f_1 - f_2 for a few
grid resolutions, then a Monte Carlo illustration of the unconditional
f(t) = log E exp(-int W(Z)^2) that compares f(t1 + t2) with f(t1) + f(t2).
The Monte Carlo numbers are noisy and only illustrative.

    python3 scripts/brownian_experiment.py --paths 100 --grids 4 8 16
"""

import argparse
from dataclasses import dataclass

import numpy as np

from detineq.brownian import GridSpec, monte_carlo_f
from detineq.suites import run_brownian


@dataclass(frozen=True)
class ExperimentConfig:
    t1: float = 1.0
    t2: float = 1.0
    paths: int = 100
    grids: tuple = (4, 8, 16)
    seed: int = 0
    mc_paths: int = 400


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t1", type=float, default=1.0)
    ap.add_argument("--t2", type=float, default=1.0)
    ap.add_argument("--paths", type=int, default=100)
    ap.add_argument("--grids", type=int, nargs="+", default=[4, 8, 16])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--mc-paths", type=int, default=400)
    args = ap.parse_args()
    cfg = ExperimentConfig(args.t1, args.t2, args.paths, tuple(args.grids), args.seed, args.mc_paths)

    print(f"pathwise gaps, t1={cfg.t1} t2={cfg.t2}, {cfg.paths} paths per grid")
    print(f"{'n=m':>5} {'min gap':>12} {'mean gap':>12} {'max gap':>12} {'violated':>9}")
    for n in cfg.grids:
        report, rows = run_brownian(GridSpec(cfg.t1, cfg.t2, n, n), cfg.paths, seed=cfg.seed)
        gaps = np.array([r["gap"] for r in rows])
        print(f"{n:>5} {gaps.min():>12.4e} {gaps.mean():>12.4e} {gaps.max():>12.4e} {report.counts['violated']:>9}")

    print(f"\nMonte Carlo f(t), {cfg.mc_paths} outer paths (illustration only)")
    print(f"{'n':>10} {'f(t1)':>10} {'f(t2)':>10} {'f(t1+t2)':>10} {'difference':>11}")
    for n in cfg.grids:
        f1 = monte_carlo_f(cfg.t1, n, cfg.mc_paths, seed=cfg.seed)
        f2 = monte_carlo_f(cfg.t2, n, cfg.mc_paths, seed=cfg.seed + 1)
        steps = max(1, round(n * (cfg.t1 + cfg.t2) / max(cfg.t1, cfg.t2)))
        f12 = monte_carlo_f(cfg.t1 + cfg.t2, steps, cfg.mc_paths, seed=cfg.seed + 2)
        print(f"{n:>10} {f1:>10.4f} {f2:>10.4f} {f12:>10.4f} {f12 - f1 - f2:>11.4f}")


if __name__ == "__main__":
    main()
