from ..errors import ConfigError, NumericalError

__all__ = [
    "OutOfDomainError",
    "NegativeNumeratorError",
    "PeakOnEdgeError",
    "BackgroundWindowError",
    "LineFitError",
    "TuningRangeError",
]


class OutOfDomainError(ConfigError):
    """Raised when an emitter or target lies outside what the cavity model covers."""

    def __init__(self, message: str):
        super().__init__(message)


class NegativeNumeratorError(NumericalError):
    """Raised when the estimated background reaches the spectral peak."""

    def __init__(self, peak: float, background: float, wavelength_nm: float):
        super().__init__(
            f"Background {background:.4g} at {wavelength_nm:.3f} nm is not below the "
            f"peak {peak:.4g}; the cavity line cannot be separated.",
        )


class PeakOnEdgeError(NumericalError):
    """Raised when the highest sample of a spectrum is its first or last one."""

    def __init__(self, wavelength_nm: float, span_nm: tuple[float, float]):
        super().__init__(
            f"The spectral peak at {wavelength_nm:.3f} nm lies on the edge of the "
            f"wavelength grid [{span_nm[0]:.3f}, {span_nm[1]:.3f}] nm; widen the span.",
        )


class BackgroundWindowError(NumericalError):
    """Raised when a background window around the peak holds no samples."""

    def __init__(self, offset_linewidths: float, wavelength_nm: float):
        super().__init__(
            f"No samples {offset_linewidths:g} linewidths from the peak at "
            f"{wavelength_nm:.3f} nm; widen the wavelength grid.",
        )


class LineFitError(NumericalError):
    """Raised when the Lorentzian fit of a spectrum does not converge."""

    def __init__(self, wavelength_nm: float, reason: str):
        super().__init__(f"Lorentzian fit around {wavelength_nm:.3f} nm failed: {reason}")


class TuningRangeError(ConfigError):
    """Raised when a temperature lies outside the linear tuning model's range."""

    def __init__(self, t_k: float, t_min_k: float, t_max_k: float):
        super().__init__(
            f"Temperature {t_k} K is outside the linear tuning range "
            f"[{t_min_k}, {t_max_k}] K.",
        )
