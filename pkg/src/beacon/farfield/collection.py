"""Objective-lens collection, single-mode-fiber coupling and vertical loss.

All figures are ratios of sums over the centred spectrum, so they do not
depend on the overall scale of the aperture field.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from pydantic import Field
from scipy.optimize import minimize_scalar

from ..fdtd import ResonanceResult
from ..geometry import CavityDesign
from ..models import Spec
from .aperture import ApertureField, compose_aperture
from .errors import CalibrationError, EmptyLightConeError, ZeroFieldError
from .kspace import DEFAULT_K_SAMPLES, KSpectrum, to_kspace

__all__ = [
    "FiberMode",
    "CollectionResult",
    "collection_efficiency",
    "fiber_mode_spectrum",
    "fiber_coupling",
    "optimize_waist",
    "collect",
    "radiation_q",
    "total_q",
    "aligned_coupling",
    "calibrate_coupling",
    "MEASURED_Q_RATIO",
]

logger = logging.getLogger(__name__)

# Measured Q of the perturbed cavity over that of bare L3 cavities.
MEASURED_Q_RATIO = 8500.0 / 11000.0


class FiberMode(Spec):
    """Gaussian approximation of the fiber's HE11 mode, imaged through the lens."""

    waist_nm: float | None = Field(
        None,
        gt=0,
        description="Mode waist referred to the aperture plane; None fits the best waist.",
    )
    na_lens: float = Field(0.75, gt=0, lt=1)


class CollectionResult(Spec):
    eta_lens: float = Field(ge=0, le=1)
    eta_smf: float = Field(ge=0, le=1, description="Fiber coupling of the collected light.")
    eta_smf_total: float = Field(
        ge=0,
        le=1,
        description="Fiber coupling of all light-cone emission, η_lens·η_smf.",
    )
    waist_nm: float
    na: float


def _cone_power(spec: KSpectrum, na: float) -> float:
    return float(spec.power[spec.cone(na)].sum())


def collection_efficiency(spec: KSpectrum, na: float) -> float:
    """Share of the light-cone power inside the objective's na·k0 cone.

    :raises EmptyLightConeError: if the grid does not resolve the light cone or
        the cone holds no power.
    """
    if not 0 < na <= 1:
        raise ValueError(f"na must lie in (0, 1], got {na}")
    total = _cone_power(spec, 1.0)
    if spec.dk >= spec.k0 or total <= 0:
        raise EmptyLightConeError(spec.k0, spec.dk, total)
    return min(_cone_power(spec, na) / total, 1.0)


def fiber_mode_spectrum(spec: KSpectrum, waist_nm: float) -> np.ndarray:
    """The Fourier transform exp(-k²w²/4) of a Gaussian field of waist w."""
    return np.exp(-(spec.k_radius**2) * waist_nm**2 / 4.0)


def _overlap(field: np.ndarray, mode: np.ndarray) -> float:
    return float(
        np.abs(np.vdot(mode, field)) ** 2
        / (np.vdot(field, field).real * np.vdot(mode, mode).real),
    )


def fiber_coupling(spec: KSpectrum, fiber: FiberMode) -> float:
    """Normalised overlap of the NA-truncated spectrum with the fiber mode.

    The Gaussian is truncated to the same disk, as the lens aperture clips
    both. With `fiber.waist_nm` unset, the waist is optimised.

    :raises ZeroFieldError: if the truncated spectrum has no power.
    """
    if fiber.waist_nm is None:
        return optimize_waist(spec, fiber.na_lens)[1]
    cone = spec.cone(fiber.na_lens)
    field = spec.amplitudes[cone]
    if not np.any(np.abs(field) > 0):
        raise ZeroFieldError(fiber.na_lens)
    return min(_overlap(field, fiber_mode_spectrum(spec, fiber.waist_nm)[cone]), 1.0)


def optimize_waist(spec: KSpectrum, na: float) -> tuple[float, float]:
    """Fiber waist maximising the coupling, with the coupling it reaches."""
    cone = spec.cone(na)
    field = spec.amplitudes[cone]
    if not np.any(np.abs(field) > 0):
        raise ZeroFieldError(na)
    k2 = spec.k_radius[cone] ** 2
    # A waist of 2/(na·k0) fills the cone to its 1/e amplitude.
    matched = 2.0 / (na * spec.k0)
    result = minimize_scalar(
        lambda log_w: -_overlap(field, np.exp(-k2 * math.exp(2 * log_w) / 4.0)),
        bounds=(math.log(0.05 * matched), math.log(20.0 * matched)),
        method="bounded",
        options={"xatol": 1e-6},
    )
    return math.exp(result.x), min(-result.fun, 1.0)


def collect(spec: KSpectrum, fiber: FiberMode | None = None) -> CollectionResult:
    """Lens collection and fiber coupling figures for one spectrum."""
    fiber = fiber or FiberMode()
    eta_lens = collection_efficiency(spec, fiber.na_lens)
    if fiber.waist_nm is None:
        waist, eta_smf = optimize_waist(spec, fiber.na_lens)
    else:
        waist, eta_smf = fiber.waist_nm, fiber_coupling(spec, fiber)
    logger.info("eta_lens = %.3f, eta_smf = %.3f (waist %.0f nm)", eta_lens, eta_smf, waist)
    return CollectionResult(
        eta_lens=eta_lens,
        eta_smf=eta_smf,
        eta_smf_total=eta_lens * eta_smf,
        waist_nm=waist,
        na=fiber.na_lens,
    )


def _energy_factor(mode: ResonanceResult, slab_thickness_nm: float) -> float:
    k0 = 2 * math.pi / mode.lambda_cav_nm
    return 0.5 * k0 * slab_thickness_nm * mode.eps_mean * mode.mode_power


def radiation_q(spec: KSpectrum, mode: ResonanceResult, slab_thickness_nm: float) -> float:
    """Vertical-loss Q from the light-cone content of the aperture spectrum.

    Q_rad = k0·h·ε̄·Σ|E|² / (2·Σ_{|k|≤k0}|A|²), which is infinite when
    nothing leaks into the light cone.
    """
    leak = _cone_power(spec, 1.0)
    if spec.dk >= spec.k0:
        raise EmptyLightConeError(spec.k0, spec.dk, leak)
    return math.inf if leak <= 0 else _energy_factor(mode, slab_thickness_nm) / leak


def total_q(q_inplane: float | None, q_rad: float) -> float:
    """Combine loss channels, 1/Q = 1/Q_inplane + 1/Q_rad."""
    loss = (1.0 / q_inplane if q_inplane else 0.0) + (1.0 / q_rad if q_rad else 0.0)
    return math.inf if loss == 0 else 1.0 / loss


def _k0_amplitude(aperture: ApertureField) -> complex:
    return complex(aperture.field.sum())


def aligned_coupling(
    mode: ResonanceResult,
    design: CavityDesign,
    magnitude: float,
    extent_nm: float | None = None,
    constructive: bool = True,
) -> complex:
    """A coupling of the given magnitude whose scatterers add in phase with the mode at k = 0."""
    scattered = _k0_amplitude(
        compose_aperture(mode, design, 1.0, extent_nm, include_mode=False, constructive=constructive),
    )
    reference = _k0_amplitude(ApertureField.from_mode(mode))
    if scattered == 0:
        return complex(magnitude)
    phase = (np.angle(reference) if reference != 0 else 0.0) - np.angle(scattered)
    return complex(magnitude * np.exp(1j * phase))


def calibrate_coupling(
    mode_unperturbed: ResonanceResult,
    mode_perturbed: ResonanceResult,
    design_perturbed: CavityDesign,
    slab_thickness_nm: float,
    target_ratio: float = MEASURED_Q_RATIO,
    k_samples: int = DEFAULT_K_SAMPLES,
    extent_nm: float | None = None,
    constructive: bool = True,
) -> complex:
    """Coupling that makes Q(perturbed)/Q(unperturbed) equal `target_ratio`.

    The light-cone power is quadratic in the coupling magnitude along the
    k = 0 aligned phase, so the magnitude is the positive root of
    P0 + 2|c|·R + |c|²·Ps = P_target.

    :raises CalibrationError: if the perturbed design has no scatterer power in
        the light cone, or the perturbed mode already leaks more than the
        target allows.
    """
    if not 0 < target_ratio < 1:
        raise CalibrationError(f"target ratio {target_ratio} must lie in (0, 1)")
    bare = to_kspace(ApertureField.from_mode(mode_unperturbed), k_samples)
    q_unperturbed = total_q(
        mode_unperturbed.q_inplane,
        radiation_q(bare, mode_unperturbed, slab_thickness_nm),
    )
    unit = aligned_coupling(mode_perturbed, design_perturbed, 1.0, extent_nm, constructive)
    base = to_kspace(ApertureField.from_mode(mode_perturbed), k_samples)
    scattered = to_kspace(
        compose_aperture(
            mode_perturbed,
            design_perturbed,
            unit,
            extent_nm,
            include_mode=False,
            constructive=constructive,
        ),
        k_samples,
    )
    cone = base.cone()
    p0 = float(base.power[cone].sum())
    cross = float(np.vdot(base.amplitudes[cone], scattered.amplitudes[cone]).real)
    ps = float(scattered.power[cone].sum())
    if ps <= 0:
        raise CalibrationError("the perturbation scatters no power into the light cone")
    energy = _energy_factor(mode_perturbed, slab_thickness_nm)
    inplane = 1.0 / mode_perturbed.q_inplane if mode_perturbed.q_inplane else 0.0
    target = energy * (1.0 / (target_ratio * q_unperturbed) - inplane)
    if target <= p0:
        q_perturbed = total_q(mode_perturbed.q_inplane, energy / p0 if p0 > 0 else math.inf)
        raise CalibrationError(
            f"the perturbed mode alone has Q = {q_perturbed:.4g}, already at or below "
            f"{target_ratio:.4f} x {q_unperturbed:.4g}; scatterers can only lower it further",
        )
    magnitude = (-cross + math.sqrt(cross**2 + ps * (target - p0))) / ps
    logger.info(
        "Calibrated coupling |c| = %.4g per nm for Q ratio %.4f (Q_unperturbed = %.4g)",
        magnitude,
        target_ratio,
        q_unperturbed,
    )
    return magnitude * unit
