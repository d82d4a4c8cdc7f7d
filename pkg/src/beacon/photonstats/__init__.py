from .clicks import BLOCK_PULSES, ClickRecords, Origin, simulate_emission, spectral_filter
from .correlate import (
    MIN_SIDE_PEAK_COUNTS,
    CorrelationHistogram,
    G2Result,
    correlate_times,
    cross_correlate,
    g2_zero,
    hbt_correlate,
)
from .decay import DecayFit, DecayHistogram, decay_histogram, fit_decay
from .errors import (
    DecayFitError,
    EmptyChannelError,
    InsufficientStatisticsError,
    PulseConfigError,
)
from .specs import DetectorSpec, EmitterDynamics, PulseTrainSpec, SpectralFilter

__all__ = [
    "PulseTrainSpec",
    "EmitterDynamics",
    "DetectorSpec",
    "SpectralFilter",
    "ClickRecords",
    "Origin",
    "BLOCK_PULSES",
    "simulate_emission",
    "spectral_filter",
    "CorrelationHistogram",
    "G2Result",
    "correlate_times",
    "hbt_correlate",
    "cross_correlate",
    "g2_zero",
    "MIN_SIDE_PEAK_COUNTS",
    "DecayHistogram",
    "DecayFit",
    "decay_histogram",
    "fit_decay",
    "PulseConfigError",
    "EmptyChannelError",
    "InsufficientStatisticsError",
    "DecayFitError",
]
