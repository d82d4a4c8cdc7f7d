"""Purcell-enhanced emission rates of a single dot."""

from __future__ import annotations

import logging
import math

import numpy as np

from .errors import OutOfDomainError
from .models import CavityParams, EmitterParams, LeakyBackground

__all__ = [
    "lorentzian",
    "max_purcell",
    "purcell_factor",
    "collected_rate",
    "lifetime",
    "calibrate_overlap",
    "dipole_angle_for_overlap",
    "detuning_for_lifetime",
]

logger = logging.getLogger(__name__)


def lorentzian(wavelength_nm, lambda_cav_nm: float, q: float):
    """Cavity line shape (1 + 4Q²(λ/λ_cav - 1)²)⁻¹; works on scalars and arrays."""
    detuning = np.asarray(wavelength_nm, dtype=float) / lambda_cav_nm - 1.0
    shape = 1.0 / (1.0 + 4.0 * q**2 * detuning**2)
    return float(shape) if np.ndim(shape) == 0 else shape


def max_purcell(q: float, v_mode_norm: float) -> float:
    """F_c0 = (3/4π²)·Q/V′."""
    return 3.0 / (4.0 * math.pi**2) * q / v_mode_norm


def purcell_factor(emitter: EmitterParams, cavity: CavityParams) -> float:
    """F_cav = F_c0·|ψ(r)|²·cos²θ·L(λ)."""
    psi = cavity.psi(emitter.position_nm)
    return (
        max_purcell(cavity.q_factor, cavity.v_mode_norm)
        * psi**2
        * emitter.orientation
        * lorentzian(emitter.wavelength_nm, cavity.lambda_cav_nm, cavity.q_factor)
    )


def collected_rate(
    emitter: EmitterParams,
    cavity: CavityParams,
    background: LeakyBackground,
) -> float:
    """Photon rate reaching the objective, Γ0·(F_cav·η_cav + F_PC·η_PC), in 1/ns."""
    f_cav = purcell_factor(emitter, cavity)
    return emitter.gamma0_per_ns * (f_cav * cavity.eta_cav + background.f_pc * background.eta_pc)


def lifetime(emitter: EmitterParams, cavity: CavityParams, background: LeakyBackground) -> float:
    """Radiative lifetime 1/(Γ0·(F_cav + F_PC)) in ps, from the total emission rate."""
    total = emitter.gamma0_per_ns * (purcell_factor(emitter, cavity) + background.f_pc)
    return 1e3 / total


def calibrate_overlap(
    cavity: CavityParams,
    background: LeakyBackground,
    gamma0_per_ns: float,
    target_tau_ps: float,
) -> float:
    """The product |ψ|²cos²θ giving `target_tau_ps` on resonance.

    :raises OutOfDomainError: if the target needs an overlap outside (0, 1].
    """
    f_cav = 1e3 / (gamma0_per_ns * target_tau_ps) - background.f_pc
    overlap = f_cav / max_purcell(cavity.q_factor, cavity.v_mode_norm)
    if not 0 < overlap <= 1:
        raise OutOfDomainError(
            f"A {target_tau_ps} ps lifetime needs |psi|²cos²θ = {overlap:.4g}, "
            "outside (0, 1]",
        )
    logger.debug("Overlap %.4g gives F_cav = %.3f on resonance", overlap, f_cav)
    return overlap


def dipole_angle_for_overlap(overlap: float, psi: float = 1.0) -> float:
    """The dipole angle θ with |ψ|²cos²θ = overlap."""
    return math.acos(math.sqrt(overlap) / psi)


def detuning_for_lifetime(
    emitter: EmitterParams,
    cavity: CavityParams,
    background: LeakyBackground,
    target_tau_ps: float,
) -> float:
    """Positive detuning λ - λ_cav (nm) at which the lifetime reaches `target_tau_ps`.

    :raises OutOfDomainError: if the target is outside the range spanned between
        resonance and infinite detuning.
    """
    on_resonance = emitter.model_copy(update={"wavelength_nm": cavity.lambda_cav_nm})
    f_peak = purcell_factor(on_resonance, cavity)
    f_cav = 1e3 / (emitter.gamma0_per_ns * target_tau_ps) - background.f_pc
    if not 0 < f_cav <= f_peak:
        raise OutOfDomainError(
            f"A {target_tau_ps} ps lifetime needs F_cav = {f_cav:.4g}, outside (0, {f_peak:.4g}]",
        )
    shape = f_cav / f_peak
    return cavity.lambda_cav_nm * math.sqrt(1.0 / shape - 1.0) / (2.0 * cavity.q_factor)
