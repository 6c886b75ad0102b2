"""Lattice-gas market model toolkit.

Simulates an Ising/lattice-gas market on a periodic hypercubic network,
evaluates the critical-dynamics predictions for return autocorrelations,
trend-strength variances and Hurst exponents, and runs the empirical
trend/regression pipeline that infers the network dimension and the
correlation time from return series.
"""

from .lattice import SpinLattice, new_lattice, save_snapshot, load_snapshot
from .dynamics import (
    CRITICAL_TEMPERATURE_2D,
    SimulationParams,
    MagnetizationSeries,
    ZeroModeParams,
    PriceDeviationSeries,
    glauber_flip_probability,
    sweep,
    run_simulation,
    run_replicas,
    magnetization_to_returns,
    binder_cumulant,
    autocorrelation_time,
    integrate_zero_mode,
)
from .trends import (
    ReturnSeries,
    WeightFunction,
    TrendSeries,
    normalize_returns,
    normalize_raw_returns,
    weight_step,
    weight_psi,
    weight_phi,
    trend_strength,
    trend_strength_recursive,
    adjacent_window_trends,
)
from .theory import (
    CriticalExponents,
    PropagatorModel,
    DomainError,
    PUBLISHED_EXPONENT_TABLE,
    critical_exponent_table,
    exponents_for_dimension,
    dimension_for_kappa,
    eta_from_beta_nu,
    propagator,
    propagator_derivatives,
    predicted_return_autocorrelation,
    predicted_trend_return_correlation,
    predicted_trend_variance,
    predicted_adjacent_window_correlation,
    predicted_hurst,
)
from .stats import (
    RegressionReport,
    BootstrapResult,
    CrossValidationResult,
    ParabolicFit,
    ScalingFit,
    fit_cubic,
    fit_cubic_xy,
    fit_langevin_pair,
    fit_langevin_xy,
    bootstrap_errors,
    bootstrap_errors_xy,
    cross_validate,
    cross_validate_xy,
    fit_parabolic_b,
    moment_scaling,
    fit_kappa,
    fractional_gaussian_noise,
    gaussian_process_from_propagator,
)

__version__ = "0.1.0"
