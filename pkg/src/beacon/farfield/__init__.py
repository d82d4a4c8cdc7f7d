from .aperture import (
    ApertureField,
    Scatterer,
    compose_aperture,
    perturbation_scatterers,
    sample_field,
)
from .collection import (
    MEASURED_Q_RATIO,
    CollectionResult,
    FiberMode,
    aligned_coupling,
    calibrate_coupling,
    collect,
    collection_efficiency,
    fiber_coupling,
    fiber_mode_spectrum,
    optimize_waist,
    radiation_q,
    total_q,
)
from .errors import CalibrationError, EmptyLightConeError, GeometryMismatchError, ZeroFieldError
from .kspace import DEFAULT_K_SAMPLES, KSpectrum, to_kspace

__all__ = [
    "ApertureField",
    "Scatterer",
    "compose_aperture",
    "perturbation_scatterers",
    "sample_field",
    "KSpectrum",
    "to_kspace",
    "DEFAULT_K_SAMPLES",
    "FiberMode",
    "CollectionResult",
    "collection_efficiency",
    "fiber_coupling",
    "fiber_mode_spectrum",
    "optimize_waist",
    "collect",
    "radiation_q",
    "total_q",
    "aligned_coupling",
    "calibrate_coupling",
    "MEASURED_Q_RATIO",
    "GeometryMismatchError",
    "EmptyLightConeError",
    "ZeroFieldError",
    "CalibrationError",
]
