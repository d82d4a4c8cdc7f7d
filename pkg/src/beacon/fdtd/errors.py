from ..errors import ConfigError, NumericalError

__all__ = [
    "CourantError",
    "SourcePlacementError",
    "RingUpError",
    "InstabilityError",
    "NoResonanceError",
    "AmbiguousFitError",
    "ShortSeriesError",
]


class CourantError(ConfigError):
    """Raised when the time step violates the 2D Courant bound."""

    def __init__(self, courant: float):
        super().__init__(
            f"Courant number {courant} must lie in (0, 1]; the time step is "
            "courant·dx/(c·√2).",
        )


class SourcePlacementError(ConfigError):
    """Raised when a source or probe sits outside the grid or inside the PML."""

    def __init__(self, what: str, position: tuple[int, int], shape: tuple[int, int], pml: int):
        super().__init__(
            f"{what} at cell {position} is outside the interior of a {shape} grid "
            f"with {pml} PML cells.",
        )


class RingUpError(ConfigError):
    """Raised when a run is too short to finish injecting the source pulse."""

    def __init__(self, steps: int, turn_off_step: int):
        super().__init__(
            f"{steps} steps do not cover the source ring-up, which ends at step "
            f"{turn_off_step}.",
        )


class InstabilityError(NumericalError):
    """Raised when a field sample exceeds the divergence threshold."""

    def __init__(self, step: int, peak: float, threshold: float):
        super().__init__(
            f"Field diverged at step {step}: |E| = {peak:.3g} exceeds {threshold:.3g}.",
        )


class NoResonanceError(NumericalError):
    """Raised when no spectral peak in the search window clears the prominence threshold."""

    def __init__(self, window_nm: tuple[float, float], prominence: float, best: float):
        super().__init__(
            f"No resonance in {window_nm[0]:.1f}-{window_nm[1]:.1f} nm: best peak "
            f"prominence {best:.3g} is below the threshold {prominence:.3g}.",
        )


class AmbiguousFitError(NumericalError):
    """Raised when the ring-down is not a single exponential within tolerance."""

    def __init__(self, residual: float, tolerance: float, points: int):
        super().__init__(
            f"Energy decay is not single-exponential: log-fit residual {residual:.3g} "
            f"over {points} samples exceeds {tolerance:.3g}.",
        )


class ShortSeriesError(NumericalError):
    """Raised when fewer than the required optical cycles follow source turn-off."""

    def __init__(self, cycles: float, required: float):
        super().__init__(
            f"Only {cycles:.1f} optical cycles follow source turn-off; "
            f"{required:.0f} are required.",
        )
