"""Flat-top lag-window spectral density estimation with automatic bandwidth choice."""

__version__ = "0.1.0"

from .bandwidth import BandwidthSelection, RuleConfig, m_to_M, pick_m_hat, threshold
from .errors import (
    ConstantSeries,
    DegenerateFit,
    DegenerateModel,
    EmbeddingFailure,
    ExperimentQualityError,
    FlatTopError,
    InsufficientLags,
    InvalidBreakpoint,
    InvalidConfig,
    InvalidSeries,
    LagOutOfRange,
    NonStationary,
)
from .kernel import FlatTopConfig, kernel_function, lag_weights, lambda_trap
from .montecarlo import (
    ExperimentConfig,
    ExperimentResult,
    deterministic_oracle_m,
    fit_scaling,
    run_experiment,
    run_replicate,
)
from .spectral import (
    FrequencyGrid,
    SpectrumEstimate,
    clip_nonnegative,
    convolution_estimate,
    estimate_auto,
    lag_window_estimate,
    periodogram,
)
from .synthetic import (
    AcfModel,
    ValidAcf,
    ar2_from_pole,
    eval_model_acf,
    make_psd,
    simulate_arma,
    simulate_gaussian,
    true_spectral_density,
)
from .timeseries import (
    AcfEstimate,
    TimeSeries,
    sample_autocovariance,
    sample_autocovariance_fast,
    sample_mean,
)
