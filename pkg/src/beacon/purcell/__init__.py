from .errors import (
    BackgroundWindowError,
    LineFitError,
    NegativeNumeratorError,
    OutOfDomainError,
    PeakOnEdgeError,
    TuningRangeError,
)
from .models import BULK_LIFETIME_PS, CavityParams, EmitterParams, LeakyBackground
from .rates import (
    calibrate_overlap,
    collected_rate,
    detuning_for_lifetime,
    dipole_angle_for_overlap,
    lifetime,
    lorentzian,
    max_purcell,
    purcell_factor,
)
from .spectrum import (
    BACKGROUND_OFFSET_LINEWIDTHS,
    EmissionSpectrum,
    EnsembleSpec,
    LorentzianFit,
    efficiency_ratio,
    ensemble_spectrum,
    fit_lorentzian,
    peak_and_background,
)
from .tuning import TuningModel, TuningSweep, crossing_temperature, sweep_temperature, tune

__all__ = [
    "EmitterParams",
    "CavityParams",
    "LeakyBackground",
    "BULK_LIFETIME_PS",
    "lorentzian",
    "max_purcell",
    "purcell_factor",
    "collected_rate",
    "lifetime",
    "calibrate_overlap",
    "dipole_angle_for_overlap",
    "detuning_for_lifetime",
    "EnsembleSpec",
    "EmissionSpectrum",
    "LorentzianFit",
    "ensemble_spectrum",
    "peak_and_background",
    "efficiency_ratio",
    "fit_lorentzian",
    "BACKGROUND_OFFSET_LINEWIDTHS",
    "TuningModel",
    "TuningSweep",
    "tune",
    "crossing_temperature",
    "sweep_temperature",
    "OutOfDomainError",
    "NegativeNumeratorError",
    "PeakOnEdgeError",
    "BackgroundWindowError",
    "LineFitError",
    "TuningRangeError",
]
