"""Randomized verification suites and the JSON run report.

A suite runs ``trials`` independent trials.  Trial ``i`` draws everything
from substream ``mix(mix(seed, suite), i)`` and yields one or more
GapReports; the trial is violated if any report is violated.  Violating
trials are recorded in full, including the matrices, so they can be replayed.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .blocks import (
    block_inverse_2x2,
    fischer_terms,
    identity_residuals,
    schur_complement,
    sylvester_logdets,
)
from .brownian import GridSpec, equivalent_form_check, sample_path, superadditivity_gap
from .dense import as_sym, invert, loewner_cmp
from .inequalities import (
    REL_TOL,
    GapReport,
    Verdict,
    fingerprint,
    fischer_gap,
    grothendieck_gap,
    lemma_gap,
    make_report,
    residual_report,
    theorem1_gap,
    theorem2_gap,
    weyl_gap,
)
from .randgen import GenConfig, make_rng, psd_from_rng, random_instance, spd_from_rng, substream_seed

IDENTITY_TOL = 1e-8
AUX_MAX_DIM = 8
LEMMA_SCALES = (0.5, 1.0, 2.0)

SUITES = ("theorem1", "theorem2", "lemma", "grothendieck", "weyl", "fischer", "identities")

TrialResult = tuple[list[GapReport], dict]


def _mat(a) -> list:
    return as_sym(a).entries.tolist()


def _aux_dim(rng: np.random.Generator, cfg: GenConfig, low: int = 1) -> int:
    return int(rng.integers(low, max(low, min(cfg.max_dim, AUX_MAX_DIM)) + 1))


def trial_theorem1(cfg: GenConfig, trial: int, rel_tol: float) -> TrialResult:
    inst = random_instance("theorem1", cfg, trial)
    payload = {
        "c": _mat(inst.c),
        "partition": list(inst.partition.sizes),
        "perturbations": [_mat(d) for d in inst.perturbations],
    }
    return [theorem1_gap(inst, rel_tol)], payload


def trial_theorem2(cfg: GenConfig, trial: int, rel_tol: float) -> TrialResult:
    inst = random_instance("theorem2", cfg, trial)
    r = theorem2_gap(inst, rel_tol)
    scale = 1.0 + abs(r.lhs_log) + abs(r.rhs_log)
    agree = residual_report(
        "theorem2-equivalent-form", abs(r.gap - r.details["equivalent_gap"]), scale, r.fingerprint, IDENTITY_TOL
    )
    payload = {
        "c": _mat(inst.c),
        "partition": list(inst.partition.sizes),
        "perturbations": [_mat(d) for d in inst.perturbations],
    }
    return [r, agree], payload


def trial_lemma(cfg: GenConfig, trial: int, rel_tol: float) -> TrialResult:
    seed = substream_seed(cfg.seed, "lemma", trial)
    rng = make_rng(seed)
    n = _aux_dim(rng, cfg)
    v = spd_from_rng(rng, n, cfg)
    w = psd_from_rng(rng, n, cfg)
    d = psd_from_rng(rng, n, cfg)
    reports = []
    for t in LEMMA_SCALES:
        r = lemma_gap(v.entries + t * w.entries, v, d, seed=seed, rel_tol=rel_tol)
        reports.append(make_report(f"lemma-t{t:g}", r.lhs_log, r.rhs_log, r.gap, r.fingerprint, rel_tol=rel_tol))
    return reports, {"v": _mat(v), "w": _mat(w), "d": _mat(d), "scales": list(LEMMA_SCALES)}


def trial_grothendieck(cfg: GenConfig, trial: int, rel_tol: float) -> TrialResult:
    seed = substream_seed(cfg.seed, "grothendieck", trial)
    rng = make_rng(seed)
    n = _aux_dim(rng, cfg)
    a = psd_from_rng(rng, n, cfg)
    b = psd_from_rng(rng, n, cfg)
    return [grothendieck_gap(a, b, seed=seed, rel_tol=rel_tol)], {"a": _mat(a), "b": _mat(b)}


def trial_weyl(cfg: GenConfig, trial: int, rel_tol: float) -> TrialResult:
    seed = substream_seed(cfg.seed, "weyl", trial)
    rng = make_rng(seed)
    n = _aux_dim(rng, cfg)
    b = spd_from_rng(rng, n, cfg)
    w = psd_from_rng(rng, n, cfg)
    return list(weyl_gap(b, w, seed=seed, rel_tol=rel_tol)), {"b": _mat(b), "w": _mat(w)}


def _split_instance(rng: np.random.Generator, cfg: GenConfig):
    n = _aux_dim(rng, cfg, low=2)
    m = spd_from_rng(rng, n, cfg)
    split = int(rng.integers(1, n))
    return m, split


def trial_fischer(cfg: GenConfig, trial: int, rel_tol: float) -> TrialResult:
    seed = substream_seed(cfg.seed, "fischer", trial)
    rng = make_rng(seed)
    m, split = _split_instance(rng, cfg)
    fp = fingerprint(m, seed=seed)
    ineq = fischer_gap(m, split, seed=seed, rel_tol=rel_tol)
    t = fischer_terms(m, split)
    slack = make_report(
        "fischer-schur-slack", t["logdet_d"], t["logdet_schur"], t["logdet_d"] - t["logdet_schur"], fp, rel_tol=rel_tol
    )
    identity = residual_report(
        "fischer-identity",
        abs(t["logdet_m"] - t["logdet_a"] - t["logdet_schur"]),
        1.0 + abs(t["logdet_m"]) + abs(t["logdet_a"]) + abs(t["logdet_schur"]),
        fp,
        IDENTITY_TOL,
    )
    s_a = schur_complement(m, split)
    min_eig = loewner_cmp(s_a, np.zeros((s_a.n, s_a.n)))
    positivity = make_report("schur-positivity", min_eig, 0.0, min_eig, fp, tol=rel_tol * (1.0 + s_a.max_abs))
    return [ineq, slack, identity, positivity], {"m": _mat(m), "split": split}


def trial_identities(cfg: GenConfig, trial: int, rel_tol: float) -> TrialResult:
    seed = substream_seed(cfg.seed, "identities", trial)
    rng = make_rng(seed)
    m, split = _split_instance(rng, cfg)
    aux = psd_from_rng(rng, m.n, cfg)
    fp = fingerprint(m, aux, seed=seed)
    inv = invert(m)
    inv_scale = 1.0 + inv.max_abs
    block_inv = residual_report(
        "block-inverse", float(np.max(np.abs(block_inverse_2x2(m, split).entries - inv.entries))), inv_scale, fp, IDENTITY_TOL
    )
    res = identity_residuals(m, split, aux)
    # (A - B D^{-1} B^T)^{-1} is the leading block of m^{-1}
    woodbury = residual_report("woodbury", res.woodbury, inv_scale, fp, IDENTITY_TOL)
    _, yx = sylvester_logdets(m, aux)
    sylvester = residual_report("sylvester", res.sylvester, 1.0 + abs(yx), fp, IDENTITY_TOL)
    return [block_inv, woodbury, sylvester], {"m": _mat(m), "split": split, "aux": _mat(aux)}


TRIALS: dict[str, Callable[[GenConfig, int, float], TrialResult]] = {
    "theorem1": trial_theorem1,
    "theorem2": trial_theorem2,
    "lemma": trial_lemma,
    "grothendieck": trial_grothendieck,
    "weyl": trial_weyl,
    "fischer": trial_fischer,
    "identities": trial_identities,
}


def trial_verdict(reports: Iterable[GapReport]) -> Verdict:
    reports = list(reports)
    if any(r.verdict is Verdict.VIOLATED for r in reports):
        return Verdict.VIOLATED
    if reports and all(r.verdict is Verdict.SKIPPED for r in reports):
        return Verdict.SKIPPED
    return Verdict.HOLDS


@dataclass
class RunReport:
    suite: str
    config: dict
    trials: int
    tol: float
    counts: dict = field(default_factory=lambda: {v.value: 0 for v in Verdict})
    violations: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    wall_clock: float = 0.0

    @property
    def ok(self) -> bool:
        return self.counts["violated"] == 0

    def to_dict(self, include_wall_clock: bool = True) -> dict:
        out = {
            "suite": self.suite,
            "seed": self.config["seed"],
            "trials": self.trials,
            "tol": self.tol,
            "config": self.config,
            "counts": self.counts,
            "violations": self.violations,
            "summary": self.summary,
        }
        if include_wall_clock:
            out["wall_clock"] = self.wall_clock
        return out

    def to_json(self, include_wall_clock: bool = True) -> str:
        return json.dumps(self.to_dict(include_wall_clock), indent=2, sort_keys=True)


def _summarize(summary: dict, r: GapReport) -> None:
    s = summary.setdefault(r.name, {"count": 0, "holds": 0, "violated": 0, "skipped": 0, "min_gap": None})
    s["count"] += 1
    s[r.verdict.value] += 1
    if r.verdict is not Verdict.SKIPPED and (s["min_gap"] is None or r.gap < s["min_gap"]):
        s["min_gap"] = r.gap


def _config_echo(cfg: GenConfig, trials: int, rel_tol: float) -> dict:
    return {
        "seed": cfg.seed,
        "trials": trials,
        "max_dim": cfg.max_dim,
        "max_blocks": cfg.max_blocks,
        "cond_cap": cfg.cond_cap,
        "psd_rank_deficient_prob": cfg.psd_rank_deficient_prob,
        "tol": rel_tol,
    }


def run_suite(
    suite: str,
    cfg: GenConfig,
    trials: int,
    rel_tol: float = REL_TOL,
    on_trial: Optional[Callable[[str, int, list[GapReport]], None]] = None,
) -> RunReport:
    """Run one suite, or every suite in order for ``suite == "all"``."""
    if suite != "all" and suite not in TRIALS:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)} or all")
    if trials < 0:
        raise ValueError("trials must be non-negative")
    names = SUITES if suite == "all" else (suite,)
    report = RunReport(suite, _config_echo(cfg, trials, rel_tol), trials * len(names), rel_tol)
    start = time.perf_counter()
    for name in names:
        fn = TRIALS[name]
        for i in range(trials):
            reports, payload = fn(cfg, i, rel_tol)
            verdict = trial_verdict(reports)
            report.counts[verdict.value] += 1
            for r in reports:
                _summarize(report.summary, r)
            if verdict is Verdict.VIOLATED:
                report.violations.append(
                    {
                        "suite": name,
                        "trial": i,
                        "substream_seed": substream_seed(cfg.seed, name, i),
                        "reports": [r.to_dict() for r in reports if r.verdict is Verdict.VIOLATED],
                        "instance": payload,
                    }
                )
            if on_trial is not None:
                on_trial(name, i, reports)
    report.wall_clock = time.perf_counter() - start
    return report


_GAP_REPORT_SCHEMA = {
    "type": "object",
    "required": ["name", "lhs_log", "rhs_log", "gap", "tol", "verdict", "fingerprint"],
    "properties": {
        "name": {"type": "string"},
        "lhs_log": {"type": "number"},
        "rhs_log": {"type": "number"},
        "gap": {"type": "number"},
        "tol": {"type": "number", "minimum": 0},
        "verdict": {"enum": ["holds", "violated", "skipped"]},
        "fingerprint": {"type": "string"},
        "details": {"type": "object", "additionalProperties": {"type": "number"}},
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["suite", "seed", "trials", "tol", "counts", "violations"],
    "properties": {
        "suite": {"type": "string"},
        "seed": {"type": "integer"},
        "trials": {"type": "integer", "minimum": 0},
        "tol": {"type": "number", "minimum": 0},
        "config": {"type": "object"},
        "counts": {
            "type": "object",
            "required": ["holds", "violated", "skipped"],
            "properties": {k: {"type": "integer", "minimum": 0} for k in ("holds", "violated", "skipped")},
        },
        "violations": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["suite", "trial", "substream_seed", "reports", "instance"],
                "properties": {
                    "suite": {"type": "string"},
                    "trial": {"type": "integer", "minimum": 0},
                    "substream_seed": {"type": "integer"},
                    "reports": {"type": "array", "items": _GAP_REPORT_SCHEMA},
                    "instance": {"type": "object"},
                },
            },
        },
        "summary": {"type": "object"},
        "wall_clock": {"type": "number"},
    },
}


BROWNIAN_XCHECK_TOL = 1e-10


def run_brownian(
    grid: GridSpec,
    paths: int,
    seed: int = 0,
    lambda_scale: float = 1.0,
    rel_tol: float = REL_TOL,
    factor: float = 2.0,
) -> tuple[RunReport, list[dict]]:
    """Per-path super-additivity gaps plus the equivalent-form cross-check.

    Returns the run report and one row per path with f_full, f_1, f_2, gap.
    """
    config = {
        "seed": seed,
        "paths": paths,
        "t1": grid.t1,
        "t2": grid.t2,
        "n": grid.n,
        "m": grid.m,
        "lambda_scale": lambda_scale,
        "factor": factor,
        "tol": rel_tol,
    }
    report = RunReport("brownian", config, paths, rel_tol)
    rows = []
    start = time.perf_counter()
    for i in range(paths):
        path = sample_path(grid, i, seed=seed)
        sr = superadditivity_gap(path, lambda_scale=lambda_scale, factor=factor, rel_tol=rel_tol)
        eq = equivalent_form_check(path, lambda_scale=lambda_scale, factor=factor)
        gap_report = make_report(
            "superadditivity", sr.f_full, sr.f_1 + sr.f_2, sr.gap, sr.fingerprint, tol=sr.tol
        )
        xcheck = residual_report(
            "superadditivity-equivalent-form", abs(sr.gap - 0.5 * eq.gap), 1.0, sr.fingerprint, BROWNIAN_XCHECK_TOL
        )
        reports = [gap_report, xcheck]
        verdict = trial_verdict(reports)
        report.counts[verdict.value] += 1
        for r in reports:
            _summarize(report.summary, r)
        if verdict is Verdict.VIOLATED:
            report.violations.append(
                {
                    "suite": "brownian",
                    "trial": i,
                    "substream_seed": path.seed,
                    "reports": [r.to_dict() for r in reports if r.verdict is Verdict.VIOLATED],
                    "instance": {"z": path.z.tolist()},
                }
            )
        rows.append({"path": i, "f_full": sr.f_full, "f_1": sr.f_1, "f_2": sr.f_2, "gap": sr.gap})
    report.wall_clock = time.perf_counter() - start
    return report, rows
