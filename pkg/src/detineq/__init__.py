"""Numerical verification of determinant inequalities for perturbed SPD matrices."""

from .blocks import (
    BlockPartition,
    BlockView,
    IdentityResiduals,
    block_diag,
    block_inverse_2x2,
    diagonal_blocks,
    extract_blocks,
    identity_residuals,
    reassemble,
    schur_complement,
    woodbury_residual,
)
from .brownian import (
    GridSpec,
    PathInstance,
    SuperaddReport,
    covariance_from_path,
    sample_path,
    superadditivity_gap,
)
from .dense import (
    EigenDecomp,
    SpdMatrix,
    SymMatrix,
    cholesky,
    invert,
    log_det,
    loewner_cmp,
    loewner_geq,
    spd_sqrt,
    sym_eigen,
)
from .errors import (
    DimensionMismatch,
    NoConvergence,
    NotPositiveDefinite,
    PreconditionFailed,
    WoodburySkipped,
)
from .inequalities import (
    GapReport,
    TheoremInstance,
    Verdict,
    equivalent_form_gap,
    fischer_gap,
    generalized_gap,
    grothendieck_gap,
    lemma_gap,
    log_ratio,
    theorem1_gap,
    theorem2_gap,
    weyl_gap,
)
from .randgen import GenConfig, SearchResult, random_instance, random_psd, random_spd, search_counterexample
from .suites import RunReport, run_brownian, run_suite
