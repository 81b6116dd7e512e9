"""Fluid reflecting-surface link simulator and closed-form analysis."""

__version__ = "0.1.0"

from .special import (  # noqa: E402
    bessel_j0_cylindrical,
    bessel_j0_spherical,
    ln_gamma,
    reg_lower_inc_gamma,
    reg_upper_inc_gamma,
)
from .correlation import (  # noqa: E402
    SurfaceGeometry,
    build_correlation_matrix,
    jakes_coefficient,
    principal_submatrix,
    psd_sqrt,
    uniform_grid_selection,
)
from .channel import (  # noqa: E402
    LinkBudget,
    PathLoss,
    effective_channel,
    equivalent_gain_coherent,
    equivalent_gain_static,
    path_loss_factor,
    received_snr,
    ris_baseline_gain,
    sample_channels,
    select_top_products,
)
from .analysis import (  # noqa: E402
    GammaFit,
    ergodic_capacity_asymptotic,
    ergodic_capacity_bound,
    gamma_cdf,
    gamma_fit,
    gamma_pdf,
    gamma_quantile,
    outage_asymptotic,
    outage_probability,
    sample_gain_exponential_mixture,
    trace_power,
)
from .montecarlo import (  # noqa: E402
    AdaptiveFrisMode,
    RisBaselineMode,
    StaticMode,
    empirical_cdf,
    estimate_ergodic_capacity,
    estimate_outage,
    ks_statistic,
    run_trials,
    trial_rng,
)
from .config import (  # noqa: E402
    ConfigError,
    ExperimentConfig,
    db_to_linear,
    linear_to_db,
    load_config,
    parse_config,
    preset_config,
)
from .experiments import cmd_capacity, cmd_dist, cmd_outage, cmd_sweep_m  # noqa: E402

__all__ = [
    "bessel_j0_cylindrical",
    "bessel_j0_spherical",
    "ln_gamma",
    "reg_lower_inc_gamma",
    "reg_upper_inc_gamma",
    "SurfaceGeometry",
    "build_correlation_matrix",
    "jakes_coefficient",
    "principal_submatrix",
    "psd_sqrt",
    "uniform_grid_selection",
    "LinkBudget",
    "PathLoss",
    "effective_channel",
    "equivalent_gain_coherent",
    "equivalent_gain_static",
    "path_loss_factor",
    "received_snr",
    "ris_baseline_gain",
    "sample_channels",
    "select_top_products",
    "GammaFit",
    "ergodic_capacity_asymptotic",
    "ergodic_capacity_bound",
    "gamma_cdf",
    "gamma_fit",
    "gamma_pdf",
    "gamma_quantile",
    "outage_asymptotic",
    "outage_probability",
    "sample_gain_exponential_mixture",
    "trace_power",
    "AdaptiveFrisMode",
    "RisBaselineMode",
    "StaticMode",
    "empirical_cdf",
    "estimate_ergodic_capacity",
    "estimate_outage",
    "ks_statistic",
    "run_trials",
    "trial_rng",
    "ConfigError",
    "ExperimentConfig",
    "db_to_linear",
    "linear_to_db",
    "load_config",
    "parse_config",
    "preset_config",
    "cmd_capacity",
    "cmd_dist",
    "cmd_outage",
    "cmd_sweep_m",
]
