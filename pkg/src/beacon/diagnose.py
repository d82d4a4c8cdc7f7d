"""Diagnostic functions, mainly for use when reporting problems."""

import platform
import sys
from importlib import metadata

from . import __version__

__all__ = ["versions", "diagnose"]

TRACKED_PACKAGES = ("numpy", "scipy", "pydantic", "joblib")


def versions() -> dict[str, str]:
    """Versions of Python, beacon and its numerical stack, as recorded in manifests."""
    found = {"python": platform.python_version(), "beacon": __version__}
    for name in TRACKED_PACKAGES:
        try:
            found[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            found[name] = "not installed"
    return found


def diagnose() -> None:
    """Print the environment beacon is running in.

    :return: None; diagnostics are printed to standard output.
    """
    print(f"Diagnostic running on beacon {__version__}")
    print(f"Python version {sys.version}")
    for name, version in versions().items():
        print(f"Found {name} version {version}")
