"""Log-domain gaps for the perturbed-determinant inequalities.

Every gap is oriented so that ``gap >= 0`` means the inequality holds,
whatever its direction on the page.  A report holds when
``gap >= -tol`` with ``tol = rel_tol * (1 + |lhs| + |rhs|)``.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field
from typing import Literal, Mapping, Optional, Sequence

import numpy as np

from .blocks import BlockPartition, block_diag, diagonal_blocks, fischer_terms
from .dense import (
    MatrixLike,
    SpdMatrix,
    SymMatrix,
    as_spd,
    as_sym,
    cholesky,
    invert,
    loewner_cmp,
    lu_log_det,
)
from .errors import DimensionMismatch, PreconditionFailed

REL_TOL = 1e-9

Variant = Literal["theorem1", "theorem2"]


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    SKIPPED = "skipped"


def fingerprint(*mats: MatrixLike, seed: Optional[int] = None) -> str:
    """Short content hash of the inputs, suffixed with the RNG seed if known."""
    h = hashlib.blake2b(digest_size=8)
    for m in mats:
        a = np.ascontiguousarray(as_sym(m).entries)
        h.update(np.int64(a.shape[0]).tobytes())
        h.update(a.tobytes())
    return f"{h.hexdigest()}:{'-' if seed is None else seed}"


def tolerance(lhs: float, rhs: float, rel_tol: float = REL_TOL) -> float:
    return rel_tol * (1.0 + abs(lhs) + abs(rhs))


@dataclass(frozen=True)
class GapReport:
    name: str
    lhs_log: float
    rhs_log: float
    gap: float
    tol: float
    verdict: Verdict
    fingerprint: str
    details: Mapping[str, float] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs_log": self.lhs_log,
            "rhs_log": self.rhs_log,
            "gap": self.gap,
            "tol": self.tol,
            "verdict": self.verdict.value,
            "fingerprint": self.fingerprint,
            "details": dict(self.details),
        }


def make_report(
    name: str,
    lhs: float,
    rhs: float,
    gap: float,
    fp: str,
    tol: Optional[float] = None,
    rel_tol: float = REL_TOL,
    details: Optional[Mapping[str, float]] = None,
) -> GapReport:
    tol = tolerance(lhs, rhs, rel_tol) if tol is None else tol
    verdict = Verdict.HOLDS if gap >= -tol else Verdict.VIOLATED
    return GapReport(name, float(lhs), float(rhs), float(gap), float(tol), verdict, fp, dict(details or {}))


def residual_report(name: str, residual: Optional[float], scale: float, fp: str, rel_tol: float) -> GapReport:
    """Wrap an identity residual r as a gap -r with tolerance rel_tol * scale.

    A missing residual (identity precondition not met) gives a skipped report.
    """
    tol = rel_tol * scale
    if residual is None:
        return GapReport(name, 0.0, 0.0, 0.0, tol, Verdict.SKIPPED, fp)
    return make_report(name, residual, 0.0, -residual, fp, tol=tol)


@dataclass(frozen=True, eq=False)
class TheoremInstance:
    c: SpdMatrix
    partition: BlockPartition
    perturbations: tuple[SpdMatrix, ...]
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "c", as_spd(self.c))
        object.__setattr__(self, "perturbations", tuple(as_spd(d) for d in self.perturbations))
        if self.partition.total != self.c.n:
            raise DimensionMismatch(f"partition {self.partition.sizes} does not fit {self.c.n}x{self.c.n}")
        if len(self.perturbations) != self.partition.k:
            raise DimensionMismatch(f"{len(self.perturbations)} perturbations for {self.partition.k} blocks")
        for d, size in zip(self.perturbations, self.partition.sizes):
            if d.n != size:
                raise DimensionMismatch(f"perturbation is {d.n}x{d.n}, block is {size}x{size}")

    @property
    def d_diag(self) -> SymMatrix:
        return block_diag(self.perturbations)

    def fingerprint(self) -> str:
        return fingerprint(self.c, *self.perturbations, seed=self.seed)


def log_ratio(c: MatrixLike, d: MatrixLike) -> float:
    """log det(C + D) - log det(C) for SPD C and PSD D."""
    c, d = as_spd(c), as_sym(d)
    if c.n != d.n:
        raise DimensionMismatch(f"C is {c.n}x{c.n}, D is {d.n}x{d.n}")
    return cholesky(c.entries + d.entries).logdet - c.logdet


def _theorem2_blocks(c: SpdMatrix, p: BlockPartition) -> tuple[SymMatrix, list[SymMatrix]]:
    """B = C^{-1} and the C_i, defined as inverses of the diagonal blocks of B."""
    b = invert(c)
    if p.k == 1:
        # the only diagonal block of C^{-1} is C^{-1} itself
        return b, [c.base]
    return b, [invert(bi) for bi in diagonal_blocks(b, p)]


def _gap(
    c: SpdMatrix,
    d: SymMatrix,
    p: BlockPartition,
    variant: Variant,
    fp: str,
    rel_tol: float,
    name: str,
) -> GapReport:
    d_blocks = diagonal_blocks(d, p)
    if variant == "theorem1":
        c_blocks = diagonal_blocks(c, p)
    elif variant == "theorem2":
        _, c_blocks = _theorem2_blocks(c, p)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    lhs = log_ratio(c, d)
    rhs = sum(log_ratio(ci, di) for ci, di in zip(c_blocks, d_blocks))
    gap = lhs - rhs if variant == "theorem1" else rhs - lhs
    return make_report(name, lhs, rhs, gap, fp, rel_tol=rel_tol)


def theorem1_gap(inst: TheoremInstance, rel_tol: float = REL_TOL) -> GapReport:
    """det(C + diag D)/det C >= prod det(C_i + D_i)/det C_i, C_i the diagonal blocks of C."""
    return _gap(inst.c, inst.d_diag, inst.partition, "theorem1", inst.fingerprint(), rel_tol, "theorem1")


def equivalent_form_gap(
    b: MatrixLike,
    partition: BlockPartition,
    perturbations: Sequence[MatrixLike],
    fp: Optional[str] = None,
    rel_tol: float = REL_TOL,
) -> GapReport:
    """sum_i log det(I + B_i D_i) - log det(I + B diag(D_1..D_k)), B_i the diagonal blocks of B.

    The products are not symmetric, so every determinant goes through LU.
    """
    b = as_sym(b)
    if partition.total != b.n:
        raise DimensionMismatch(f"partition {partition.sizes} does not fit {b.n}x{b.n}")
    d = block_diag(perturbations).entries
    lhs = lu_log_det(np.eye(b.n) + b.entries @ d)
    rhs = 0.0
    for i, di in enumerate(perturbations):
        sl = partition.slice(i)
        bi = b.entries[sl, sl]
        rhs += lu_log_det(np.eye(bi.shape[0]) + bi @ as_sym(di).entries)
    fp = fingerprint(b, *perturbations) if fp is None else fp
    return make_report("equivalent-form", lhs, rhs, rhs - lhs, fp, rel_tol=rel_tol)


def theorem2_gap(inst: TheoremInstance, rel_tol: float = REL_TOL) -> GapReport:
    """det(C + diag D)/det C <= prod det(C_i + D_i)/det C_i, C_i^{-1} the diagonal blocks of C^{-1}.

    ``details["equivalent_gap"]`` holds the same gap computed from
    B = C^{-1} via det(I + B diag D) and det(I + B_i D_i).
    """
    fp = inst.fingerprint()
    report = _gap(inst.c, inst.d_diag, inst.partition, "theorem2", fp, rel_tol, "theorem2")
    b, _ = _theorem2_blocks(inst.c, inst.partition)
    eq = equivalent_form_gap(b, inst.partition, inst.perturbations, fp=fp, rel_tol=rel_tol)
    return GapReport(
        report.name,
        report.lhs_log,
        report.rhs_log,
        report.gap,
        report.tol,
        report.verdict,
        fp,
        {"equivalent_gap": eq.gap},
    )


def generalized_gap(
    c: MatrixLike,
    d: MatrixLike,
    partition: BlockPartition,
    variant: Variant,
    seed: Optional[int] = None,
    rel_tol: float = REL_TOL,
) -> GapReport:
    """Theorem gap with the block-diagonal perturbation replaced by a full SPD ``d``.

    The right-hand side uses the diagonal blocks of ``d``.  A violated
    verdict is a legitimate outcome here.
    """
    c, d = as_spd(c), as_sym(d)
    fp = fingerprint(c, d, seed=seed)
    return _gap(c, d, partition, variant, fp, rel_tol, f"{variant}-general")


def lemma_gap(
    u: MatrixLike,
    v: MatrixLike,
    d: MatrixLike,
    seed: Optional[int] = None,
    rel_tol: float = REL_TOL,
) -> GapReport:
    """det(V + D)/det V >= det(U + D)/det U whenever U >= V.

    Raises PreconditionFailed if U >= V fails in the Loewner order at
    tolerance ``rel_tol``.
    """
    u, v, d = as_spd(u), as_spd(v), as_sym(d)
    diff = u.entries - v.entries
    if loewner_cmp(u, v) < -rel_tol * (1.0 + float(np.max(np.abs(diff)))):
        raise PreconditionFailed("U >= V does not hold")
    lhs = log_ratio(v, d)
    rhs = log_ratio(u, d)
    return make_report("lemma", lhs, rhs, lhs - rhs, fingerprint(u, v, d, seed=seed), rel_tol=rel_tol)


def grothendieck_gap(
    a: MatrixLike, b: MatrixLike, seed: Optional[int] = None, rel_tol: float = REL_TOL
) -> GapReport:
    """det(I + A + B) <= det(I + A) det(I + B) for PSD A, B."""
    a, b = as_sym(a), as_sym(b)
    if a.n != b.n:
        raise DimensionMismatch(f"A is {a.n}x{a.n}, B is {b.n}x{b.n}")
    eye = np.eye(a.n)
    lhs = cholesky(eye + a.entries + b.entries).logdet
    rhs = cholesky(eye + a.entries).logdet + cholesky(eye + b.entries).logdet
    return make_report("grothendieck", lhs, rhs, rhs - lhs, fingerprint(a, b, seed=seed), rel_tol=rel_tol)


def weyl_gap(
    b: MatrixLike, w: MatrixLike, seed: Optional[int] = None, rel_tol: float = REL_TOL
) -> tuple[GapReport, GapReport]:
    """Both halves of Weyl's monotonicity for A = B + W, W PSD.

    Returns the determinant report, log det A - log det B, and the inverse
    report, whose gap is the smallest eigenvalue of B^{-1} - A^{-1} (stored
    as ``lhs_log`` with ``rhs_log = 0``) with tolerance
    rel_tol * (1 + max|B^{-1}|).
    """
    b, w = as_spd(b), as_sym(w)
    a = cholesky(b.entries + w.entries)
    fp = fingerprint(b, w, seed=seed)
    det_report = make_report("weyl-det", a.logdet, b.logdet, a.logdet - b.logdet, fp, rel_tol=rel_tol)
    b_inv = invert(b)
    min_eig = loewner_cmp(b_inv, invert(a))
    inv_report = make_report(
        "weyl-inverse", min_eig, 0.0, min_eig, fp, tol=rel_tol * (1.0 + b_inv.max_abs)
    )
    return det_report, inv_report


def fischer_gap(m: MatrixLike, split: int, seed: Optional[int] = None, rel_tol: float = REL_TOL) -> GapReport:
    """det M <= det A det D for the 2x2 split of SPD M.

    ``details["schur_slack"]`` is log det D - log det S_A, which must be
    non-negative as well.
    """
    m = as_spd(m)
    t = fischer_terms(m, split)
    lhs = t["logdet_m"]
    rhs = t["logdet_a"] + t["logdet_d"]
    return make_report(
        "fischer",
        lhs,
        rhs,
        rhs - lhs,
        fingerprint(m, seed=seed),
        rel_tol=rel_tol,
        details={"schur_slack": t["logdet_d"] - t["logdet_schur"]},
    )
