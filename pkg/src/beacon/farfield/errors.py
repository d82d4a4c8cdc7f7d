from ..errors import ConfigError, NumericalError

__all__ = [
    "GeometryMismatchError",
    "EmptyLightConeError",
    "ZeroFieldError",
    "CalibrationError",
]


class GeometryMismatchError(ConfigError):
    """Raised when a mode and a design do not describe the same structure."""

    def __init__(self, reason: str):
        super().__init__(f"Mode and design do not share geometry: {reason}")


class EmptyLightConeError(NumericalError):
    """Raised when the light cone holds no grid points or no power."""

    def __init__(self, k0: float, dk: float, power: float = 0.0):
        super().__init__(
            f"Light cone |k| <= {k0:.4g} rad/nm is empty at dk = {dk:.4g} rad/nm "
            f"(power {power:.3g}); pad the aperture further.",
        )


class ZeroFieldError(NumericalError):
    """Raised when the NA-truncated spectrum carries no power."""

    def __init__(self, na: float):
        super().__init__(f"The spectrum has no power inside the NA = {na} cone.")


class CalibrationError(NumericalError):
    """Raised when the perturbation coupling cannot reach the target Q ratio."""

    def __init__(self, reason: str):
        super().__init__(f"Coupling calibration failed: {reason}")
