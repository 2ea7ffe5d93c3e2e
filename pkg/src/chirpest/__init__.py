"""Chirp signal parameter estimation by approximate and ordinary least squares."""

from .asymptotics import asymptotic_variances, sigma, sigma_inverse
from .core import (
    AssumptionError,
    ChirpComponent,
    InvalidArgumentError,
    ModelSpec,
    NoiseSpec,
    Signal,
    generate_noise,
    linear_process_c,
    synthesize,
)
from .estimate import (
    EstimationError,
    FitResult,
    alse_single,
    bic,
    lse_single,
    match_components,
    select_order,
    sequential_fit,
)
from .montecarlo import McScenario, McStats, rate_study, run_scenario
from .optimize import (
    DegenerateRegressorError,
    OptimizerConfig,
    nelder_mead,
    separable_amplitudes,
    sse,
)
from .periodogram import GridMax, GridSpec, demodulated_dft_row, grid_scan, periodogram_value

__version__ = "0.1.0"
