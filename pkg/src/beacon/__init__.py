"""Beacon - desk-scale simulation of a directional-emission single-photon source.

https://www.github.com/lmmx/beacon

Beacon follows one quantum-dot photon source from design to detector: an L3
photonic-crystal cavity with far-field perturbation layers (`geometry`), its
resonance and mode from a 2D FDTD solver (`fdtd`), lens and fiber collection
from the mode's spatial spectrum (`farfield`), Purcell-enhanced emission
spectra and temperature tuning (`purcell`), and a Monte-Carlo
Hanbury-Brown-Twiss measurement of the emitted photons (`photonstats`).
Scenarios are run from JSON configs through the `beacon` command (`cli`).
"""

__version__ = "0.1.0"

__all__ = ["BeaconError", "ConfigError", "NumericalError", "__version__"]

from .errors import BeaconError, ConfigError, NumericalError
