"""Functional data analysis for samples of one-dimensional densities.

Densities on a compact support are mapped to an unconstrained Hilbert
space (log hazard or log quantile density), analyzed there with
functional PCA, and mapped back, so that every representation and mode
of variation is again a bona fide density.  Fréchet means/variance under
the L2 and Wasserstein metrics quantify how much variation a truncated
representation explains, with a Hilbert-sphere baseline, a
boundary-corrected kernel density estimator for raw samples, a
simulation harness, and scalar-on-density regression.
"""

from .density import (
    DEFAULT_FLOOR,
    CdfFn,
    DensityFn,
    Grid,
    HazardFn,
    QuantileDensityFn,
    QuantileFn,
    dist_l2,
    dist_sup,
    dist_wasserstein,
    from_unit_support,
    normalize,
    to_cdf,
    to_hazard,
    to_quantile,
    to_quantile_density,
    to_unit_support,
    unit_grid,
)
from .errors import (
    AllZeroError,
    BadBandwidthError,
    DegenerateSigmaError,
    DensfdaError,
    EmptySampleError,
    GridMismatchError,
    KTooLargeError,
    NoConvergenceError,
    NonFiniteError,
    NotInvertibleError,
    NotSymmetricError,
    OutOfSupportError,
    RankDeficientWarning,
    SupportMismatchError,
    TooFewSamplesError,
    TransformOverflowError,
)
from .fpca import (
    EigenSystem,
    cross_sectional_mean,
    covariance,
    eigendecompose,
    fit,
    mode_of_variation,
    project_to_density,
    scores,
    truncate,
)
from .frechet import (
    FittedMethod,
    FrechetReport,
    KSelection,
    Metric,
    MethodKind,
    blend_uniform,
    frechet_mean,
    frechet_variance,
    fve_curve,
    represent,
    select_k,
    transformation_modes,
    unblend_uniform,
    wasserstein_frechet_mean,
)
from .kde import KdeConfig, Kernel, boundary_weight, default_bandwidth, estimate_density
from .regression import FlrModel, cv_mse, fit_flr, predict, project_scores, score_basis
from .simulation import (
    SIMULATION_BLEND,
    SIMULATION_FLOOR,
    GeneratedSetting,
    SettingSpec,
    SimulationResult,
    default_methods,
    gen_setting,
    run_comparison,
    truncated_normal_density,
)
from .sphere import (
    SpherePoint,
    exp_map,
    fisher_rao_mean,
    geodesic_distance,
    hs_mode,
    hs_represent,
    karcher_mean,
    log_map,
    pga,
    sqrt_embed,
    square_back,
)
from .transforms import (
    LQD,
    TransformedFn,
    TransformKind,
    TransformSpec,
    forward,
    inverse,
    log_hazard_forward,
    log_hazard_inverse,
    log_hazard_spec,
    lqd_forward,
    lqd_inverse,
)

__version__ = "0.1.0"
