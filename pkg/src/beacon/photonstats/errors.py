from ..errors import ConfigError, NumericalError

__all__ = [
    "PulseConfigError",
    "EmptyChannelError",
    "InsufficientStatisticsError",
    "DecayFitError",
]


class PulseConfigError(ConfigError):
    """Raised when the repetition period cannot hold the emitter's decay."""

    def __init__(self, rep_period_ps: float, tau_ps: float):
        super().__init__(
            f"Repetition period {rep_period_ps:.0f} ps is shorter than five lifetimes "
            f"(tau = {tau_ps:.0f} ps); successive pulses would overlap.",
        )


class EmptyChannelError(ConfigError):
    """Raised when a correlation is asked of a channel without clicks."""

    def __init__(self, channel: str):
        super().__init__(f"Channel {channel!r} has no clicks to correlate.")


class InsufficientStatisticsError(NumericalError):
    """Raised when a histogram cannot support a g2(0) estimate."""

    def __init__(self, reason: str):
        super().__init__(f"Insufficient statistics for g2(0): {reason}")


class DecayFitError(NumericalError):
    """Raised when the lifetime fit of a decay histogram does not converge."""

    def __init__(self, reason: str):
        super().__init__(f"Decay fit failed: {reason}")
