"""Grouped-horseshoe distribution toolkit.

Closed-form density and exact sampler for the d-variate normal scale
mixture with one shared half-Cauchy scale; posterior shrinkage quantities
for the unit-noise observation model; KL-ball risk bounds; and a Gibbs
sampler for additive-model selection with (grouped) horseshoe priors.
"""

from .config import DEFAULT_CONFIG, SpecFunConfig
from .distribution import (
    GhsDistribution,
    MixtureDraw,
    density,
    log_density,
    sample,
    sample_arrays,
)
from .errors import (
    ConfigError,
    DegenerateError,
    DimensionError,
    DomainError,
    GhsError,
    LengthError,
    NumericalError,
    ResourceError,
)
from .gamsel import (
    AdditiveModelSpec,
    Dataset,
    GibbsChain,
    Hyper,
    MisclassRate,
    ThresholdReport,
    classify,
    gamma_statistics,
    generate_data,
    gibbs_sampler,
    kmeans_threshold,
    misclassification_rate,
    spline_basis,
)
from .posterior import (
    PosteriorModel,
    SideModel,
    cd_integrals,
    marginal_log_density,
    posterior_mean,
    score,
    side_model_shrinkage,
    side_posterior_mean,
)
from .risk import RiskScenario, cesaro_risk_mc, kl_ball_prior_mass, risk_upper_bound
from .rng import make_rng, split_seed
from .specfun import (
    exp_scaled_gen_exp_integral,
    gen_exp_integral,
    kummer_1f1,
    phi1,
)
from .study import StudyConfig, run_study

__version__ = "0.1.0"

__all__ = [
    "AdditiveModelSpec",
    "ConfigError",
    "Dataset",
    "DEFAULT_CONFIG",
    "DegenerateError",
    "DimensionError",
    "DomainError",
    "GhsDistribution",
    "GhsError",
    "GibbsChain",
    "Hyper",
    "LengthError",
    "MisclassRate",
    "MixtureDraw",
    "NumericalError",
    "PosteriorModel",
    "ResourceError",
    "RiskScenario",
    "SideModel",
    "SpecFunConfig",
    "StudyConfig",
    "ThresholdReport",
    "cd_integrals",
    "cesaro_risk_mc",
    "classify",
    "density",
    "exp_scaled_gen_exp_integral",
    "gamma_statistics",
    "gen_exp_integral",
    "generate_data",
    "gibbs_sampler",
    "kl_ball_prior_mass",
    "kmeans_threshold",
    "kummer_1f1",
    "log_density",
    "make_rng",
    "marginal_log_density",
    "misclassification_rate",
    "phi1",
    "posterior_mean",
    "risk_upper_bound",
    "run_study",
    "sample",
    "sample_arrays",
    "score",
    "side_model_shrinkage",
    "side_posterior_mean",
    "spline_basis",
    "split_seed",
]
