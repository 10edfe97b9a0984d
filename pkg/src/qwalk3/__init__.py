"""Exact simulation and long-time limits of a 3-state quantum walk on the line."""

__version__ = "0.1.0"

from .core import (
    CoinOperator,
    CoinParameters,
    InvalidParameters,
    ProbabilityDistribution,
    SpinVector,
    WalkState,
    build_coin,
    component_probability,
    evolve,
    iter_evolve,
    localized_initial_state,
    position_distribution,
    step,
)
from .limit import (
    LimitConstants,
    LimitDistribution,
    ab_constants,
    is_localized,
    limit_cdf,
    limit_constants,
    limit_density,
    limit_distribution,
    limit_measure_origin,
    limit_moment,
    localization_mass,
    nu,
    two_state_correspondence_density,
)
from .spectral import (
    DegenerateEigenvector,
    InsufficientQuadrature,
    eigensystem,
    eigenvalues,
    eigenvector_unnormalized,
    evolve_via_fourier,
    fourier_coin,
    rotation_decomposition,
)
from .uniform import (
    EnvelopeFunction,
    NormalizationViolation,
    comb_envelope,
    delocalized_initial_state,
    lemma_limit_measure,
    limit_measure_delocalized,
    uniform_plateau_report,
)
