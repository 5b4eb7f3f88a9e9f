"""Command-line front end.

Subcommands: ``verify``, ``counterexample``, ``brownian`` and ``schur``.
Exit codes: 0 success, 1 violation / not found / not SPD, 2 usage or IO error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .blocks import BlockPartition, fischer_terms, identity_residuals, schur_complement, split2
from .brownian import GridSpec
from .dense import SymMatrix, cholesky
from .errors import NotPositiveDefinite
from .inequalities import REL_TOL
from .randgen import GenConfig, search_counterexample
from .suites import SUITES, run_brownian, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

TARGETS = {"theorem1-general": "theorem1", "theorem2-general": "theorem2"}


class UsageError(Exception):
    pass


@dataclass(frozen=True, eq=False)
class MatrixFile:
    matrix: SymMatrix
    partition: Optional[BlockPartition] = None

    def to_dict(self) -> dict:
        out: dict = {"n": self.matrix.n, "data": self.matrix.entries.reshape(-1).tolist()}
        if self.partition is not None:
            out["partition"] = list(self.partition.sizes)
        return out


def parse_matrix(obj: dict) -> MatrixFile:
    """Parse ``{"n": int, "data": [n*n reals, row-major], "partition": [ints]?}``."""
    try:
        n = obj["n"]
        data = obj["data"]
    except (KeyError, TypeError) as exc:
        raise UsageError(f"matrix JSON needs 'n' and 'data': {exc}") from exc
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise UsageError(f"'n' must be a positive integer, got {n!r}")
    if not isinstance(data, list) or len(data) != n * n:
        raise UsageError(f"'data' must hold n*n = {n * n} numbers")
    try:
        a = np.array(data, dtype=np.float64).reshape(n, n)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"'data' must be numeric: {exc}") from exc
    if not np.all(np.isfinite(a)):
        raise UsageError("'data' has non-finite entries")
    partition = None
    if obj.get("partition") is not None:
        try:
            partition = BlockPartition(tuple(obj["partition"]))
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad partition: {exc}") from exc
        if partition.total != n:
            raise UsageError(f"partition sums to {partition.total}, expected {n}")
    return MatrixFile(SymMatrix(a), partition)


def load_matrix_file(path: str) -> MatrixFile:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    return parse_matrix(obj)


def save_matrix_file(path: str, mf: MatrixFile) -> None:
    with open(path, "w") as fh:
        json.dump(mf.to_dict(), fh)


def _fmt(a) -> str:
    return np.array2string(np.asarray(a), precision=6, suppress_small=True)


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def _gen_config(args: argparse.Namespace) -> GenConfig:
    try:
        return GenConfig(
            seed=args.seed,
            max_dim=args.max_dim,
            max_blocks=args.max_blocks,
            cond_cap=args.cond_cap,
            psd_rank_deficient_prob=args.psd_rank_deficient_prob,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _check_tol(args: argparse.Namespace) -> None:
    if not args.tol >= 0:
        raise UsageError("--tol must be non-negative")


def cmd_verify(args: argparse.Namespace) -> int:
    _check_tol(args)
    if args.trials < 0:
        raise UsageError("--trials must be non-negative")
    cfg = _gen_config(args)
    report = run_suite(args.suite, cfg, args.trials, rel_tol=args.tol)
    _write(args.report, report.to_json())
    c = report.counts
    print(
        f"suite={report.suite} trials={report.trials} seed={cfg.seed} "
        f"holds={c['holds']} violated={c['violated']} skipped={c['skipped']} "
        f"time={report.wall_clock:.2f}s"
    )
    for name, s in sorted(report.summary.items()):
        print(f"  {name:<28} n={s['count']:<6} violated={s['violated']:<4} min_gap={s['min_gap']}")
    for v in report.violations[:10]:
        names = ", ".join(r["name"] for r in v["reports"])
        print(f"  VIOLATION {v['suite']} trial {v['trial']} seed {v['substream_seed']}: {names}")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_counterexample(args: argparse.Namespace) -> int:
    _check_tol(args)
    if args.max_trials < 1:
        raise UsageError("--max-trials must be at least 1")
    cfg = _gen_config(args)
    variant = TARGETS[args.target]
    res = search_counterexample(variant, cfg, args.max_trials, seeds_enabled=not args.no_seeds, rel_tol=args.tol)
    out = {
        "target": args.target,
        "found": res.found,
        "gap": res.gap,
        "trials_used": res.trials_used,
        "seed": cfg.seed,
    }
    if res.found:
        out["c"] = res.c.entries.tolist()
        out["d"] = res.d.entries.tolist()
        out["partition"] = list(res.partition.sizes)
        out["report"] = res.report.to_dict()
        print(f"{args.target}: counterexample found after {res.trials_used} trial(s)")
        print(f"C =\n{_fmt(res.c.entries)}")
        print(f"D =\n{_fmt(res.d.entries)}")
        print(f"partition = {list(res.partition.sizes)}")
        print(f"lhs_log = {res.report.lhs_log:.12g}  rhs_log = {res.report.rhs_log:.12g}  gap = {res.gap:.12g}")
    else:
        print(f"{args.target}: no counterexample in {res.trials_used} trial(s); smallest gap {res.gap:.6g}")
    _write(args.report, json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK if res.found else EXIT_FAIL


def cmd_brownian(args: argparse.Namespace) -> int:
    _check_tol(args)
    if args.paths < 1:
        raise UsageError("--paths must be at least 1")
    if args.lambda_scale < 0:
        raise UsageError("--lambda-scale must be non-negative")
    try:
        grid = GridSpec(args.t1, args.t2, args.n, args.m)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report, rows = run_brownian(grid, args.paths, seed=args.seed, lambda_scale=args.lambda_scale, rel_tol=args.tol)
    _write(args.report, report.to_json())
    if args.csv is not None:
        try:
            with open(args.csv, "w", newline="") as fh:
                w = csv.DictWriter(fh, fieldnames=["path", "f_full", "f_1", "f_2", "gap"])
                w.writeheader()
                w.writerows(rows)
        except OSError as exc:
            raise UsageError(f"cannot write {args.csv}: {exc}") from exc
    gaps = np.array([r["gap"] for r in rows])
    c = report.counts
    print(
        f"brownian paths={args.paths} n={args.n} m={args.m} t1={args.t1} t2={args.t2} seed={args.seed} "
        f"holds={c['holds']} violated={c['violated']} min_gap={gaps.min():.3e} mean_gap={gaps.mean():.3e}"
    )
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_schur(args: argparse.Namespace) -> int:
    mf = load_matrix_file(args.input)
    m = mf.matrix
    if m.n < 2:
        raise UsageError("matrix must be at least 2x2 to split")
    split = args.split
    if split is None:
        split = mf.partition.sizes[0] if mf.partition is not None and mf.partition.k > 1 else 1
    if not 1 <= split < m.n:
        raise UsageError(f"--split must satisfy 1 <= split < {m.n}")
    try:
        spd = cholesky(m)
    except NotPositiveDefinite as exc:
        print(f"not positive definite: {exc}")
        return EXIT_FAIL
    A, _, _ = split2(spd, split)
    s_a = schur_complement(spd, split)
    t = fischer_terms(spd, split)
    res = identity_residuals(spd, split)
    print(f"A =\n{_fmt(A)}")
    print(f"S_A =\n{_fmt(s_a.entries)}")
    print(f"logdet M = {t['logdet_m']:.12g}")
    print(f"logdet A = {t['logdet_a']:.12g}")
    print(f"logdet D = {t['logdet_d']:.12g}")
    print(f"logdet S_A = {t['logdet_schur']:.12g}")
    print(f"residual fischer   = {res.fischer:.3e}")
    print(f"residual woodbury  = {'skipped' if res.woodbury is None else f'{res.woodbury:.3e}'}")
    print(f"residual sylvester = {res.sylvester:.3e}")
    print(f"fischer slack logdet D - logdet S_A = {t['logdet_d'] - t['logdet_schur']:.12g}")
    return EXIT_OK


def _add_gen_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-dim", type=int, default=32)
    p.add_argument("--max-blocks", type=int, default=5)
    p.add_argument("--cond-cap", type=float, default=1e6)
    p.add_argument("--psd-rank-deficient-prob", type=float, default=1.0 / 3.0)
    p.add_argument("--tol", type=float, default=REL_TOL, help="relative tolerance factor")
    p.add_argument("--report", help="write the JSON report here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="detineq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run randomized inequality suites")
    p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    p.add_argument("--trials", type=int, default=1000)
    _add_gen_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("counterexample", help="find violations of the generalized statements")
    p.add_argument("--target", choices=sorted(TARGETS), required=True)
    p.add_argument("--max-trials", type=int, default=10000)
    p.add_argument("--no-seeds", action="store_true", help="skip the built-in 2x2 counterexample")
    _add_gen_flags(p)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("brownian", help="discretized super-additivity experiment")
    p.add_argument("--t1", type=float, default=1.0)
    p.add_argument("--t2", type=float, default=1.0)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--m", type=int, default=16)
    p.add_argument("--paths", type=int, default=100)
    p.add_argument("--lambda-scale", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=REL_TOL)
    p.add_argument("--report")
    p.add_argument("--csv", help="write per-path rows (path, f_full, f_1, f_2, gap)")
    p.set_defaults(func=cmd_brownian)

    p = sub.add_parser("schur", help="Schur complement decomposition of a matrix file")
    p.add_argument("--input", required=True)
    p.add_argument("--split", type=int)
    p.set_defaults(func=cmd_schur)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"detineq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
