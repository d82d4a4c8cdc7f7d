"""Root exceptions shared by every subpackage.

Each subpackage defines its own concrete errors next to the code that raises
them; the roots here decide how the command line reports them.
"""

__all__ = ["BeaconError", "ConfigError", "NumericalError"]


class BeaconError(Exception):
    """Base class for every error raised deliberately by beacon."""


class ConfigError(BeaconError, ValueError):
    """An input description (design, spec, scenario) is invalid or inconsistent."""


class NumericalError(BeaconError, ArithmeticError):
    """A numerical procedure failed: divergence, no resonance, a bad fit."""
