"""Closed-form robust PCA from leverage statistics (ANCP, SNCP) with the
Coherence Pursuit baseline, synthetic data models, sufficient-condition
evaluators and a Monte-Carlo harness."""
from .linalg import (
    SubspaceBasis,
    SvdFactors,
    complement_residual_norms,
    estimate_rank,
    orthonormalize,
    recovery_error,
    thin_svd,
)
from .recovery import (
    AdaptiveProjection,
    FixedFraction,
    InsufficientRankError,
    RankGreedy,
    RecoveryResult,
    select_columns,
    separation_holds,
    trial_success_exact,
    trial_success_residual,
)
from .scoring import (
    InnovationDirection,
    ScoreVector,
    ancp_scores,
    compute_scores,
    cop_scores,
    innovation_direction,
    normalize_columns,
    sncp_scores,
)

__version__ = "0.1.0"
