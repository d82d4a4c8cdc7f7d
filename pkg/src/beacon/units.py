"""Physical constants and unit conversions.

Lengths are carried in nm, times in ps (photon statistics) or in nm of
light travel (the FDTD clock, where c = 1), rates in 1/ns.
"""

import math

from scipy import constants

__all__ = [
    "C_NM_PER_PS",
    "C_NM_PER_S",
    "angular_wavenumber",
    "ct_nm_to_seconds",
    "fwhm_to_sigma",
    "rate_per_ns_to_lifetime_ps",
    "lifetime_ps_to_rate_per_ns",
    "photon_lifetime_ps",
    "rep_period_ps",
    "natural_hwhm_nm",
]

C_NM_PER_S = constants.c * 1e9
C_NM_PER_PS = constants.c * 1e-3

_FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))


def angular_wavenumber(wavelength_nm: float) -> float:
    """Free-space wavenumber k0 = 2π/λ in rad/nm (also ω in the FDTD clock)."""
    return 2.0 * math.pi / wavelength_nm


def ct_nm_to_seconds(ct_nm: float) -> float:
    """Convert an FDTD time measured in nm of light travel to seconds."""
    return ct_nm / C_NM_PER_S


def fwhm_to_sigma(fwhm: float) -> float:
    return fwhm / _FWHM_PER_SIGMA


def rate_per_ns_to_lifetime_ps(rate: float) -> float:
    return 1e3 / rate


def lifetime_ps_to_rate_per_ns(tau_ps: float) -> float:
    return 1e3 / tau_ps


def photon_lifetime_ps(q_factor: float, wavelength_nm: float) -> float:
    """Cavity photon lifetime Qλ/(2πc)."""
    return q_factor * wavelength_nm / (2.0 * math.pi * C_NM_PER_PS)


def rep_period_ps(rep_rate_hz: float) -> float:
    return 1e12 / rep_rate_hz


def natural_hwhm_nm(wavelength_nm: float, tau_ps: float) -> float:
    """Half-width of a Lorentzian line whose energy decays with lifetime τ."""
    return wavelength_nm**2 / (4.0 * math.pi * C_NM_PER_PS * tau_ps)
