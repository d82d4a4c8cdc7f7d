from .errors import (
    AmbiguousFitError,
    CourantError,
    InstabilityError,
    NoResonanceError,
    RingUpError,
    ShortSeriesError,
    SourcePlacementError,
)
from .grid import Grid2D, ProbeSeries, SourceSpec
from .mode import ResonanceResult, extract_mode, mode_volume, read_mode_csv
from .resonance import RingDownFit, SpectralPeak, find_resonance, find_resonances, linewidth_q
from .solver import YeeSimulation, pml_profile, run_fdtd

__all__ = [
    "Grid2D",
    "SourceSpec",
    "ProbeSeries",
    "YeeSimulation",
    "run_fdtd",
    "pml_profile",
    "SpectralPeak",
    "RingDownFit",
    "find_resonance",
    "find_resonances",
    "linewidth_q",
    "ResonanceResult",
    "extract_mode",
    "mode_volume",
    "read_mode_csv",
    "CourantError",
    "SourcePlacementError",
    "RingUpError",
    "InstabilityError",
    "NoResonanceError",
    "AmbiguousFitError",
    "ShortSeriesError",
]
