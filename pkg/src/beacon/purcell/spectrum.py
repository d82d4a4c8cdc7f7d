"""Ensemble photoluminescence spectra and the coupling-efficiency comparison.

Every dot of the pumped area emits at full rate. Dots inside the cavity area
couple to the cavity line; the rest emit into the leaky modes and form a
smooth background following the ensemble density.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np
from pydantic import Field, model_validator
from scipy.optimize import curve_fit

from ..models import ArrayRecord, Spec
from .errors import (
    BackgroundWindowError,
    LineFitError,
    NegativeNumeratorError,
    PeakOnEdgeError,
)
from .models import CavityParams, LeakyBackground
from .rates import lorentzian, max_purcell

__all__ = [
    "EnsembleSpec",
    "EmissionSpectrum",
    "LorentzianFit",
    "ensemble_spectrum",
    "peak_and_background",
    "efficiency_ratio",
    "fit_lorentzian",
    "BACKGROUND_OFFSET_LINEWIDTHS",
]

logger = logging.getLogger(__name__)

BACKGROUND_OFFSET_LINEWIDTHS = 5.0


class EnsembleSpec(ArrayRecord):
    """Spectral density of the dot ensemble and the areas it is spread over."""

    wavelengths_nm: np.ndarray
    rho_qd: np.ndarray
    area_total_nm2: float = Field(gt=0)
    area_cav_nm2: float = Field(gt=0)

    @model_validator(mode="after")
    def _check(self) -> EnsembleSpec:
        if self.wavelengths_nm.shape != self.rho_qd.shape or self.rho_qd.ndim != 1:
            raise ValueError("wavelengths_nm and rho_qd must be 1D arrays of equal length")
        if np.any(np.diff(self.wavelengths_nm) <= 0):
            raise ValueError("wavelengths_nm must increase strictly")
        if (self.rho_qd < 0).any():
            raise ValueError("rho_qd must be non-negative")
        if self.area_cav_nm2 > self.area_total_nm2:
            raise ValueError(
                f"area_cav_nm2={self.area_cav_nm2} exceeds area_total_nm2={self.area_total_nm2}",
            )
        return self

    @classmethod
    def gaussian(
        cls,
        area_total_nm2: float,
        area_cav_nm2: float,
        center_nm: float = 920.0,
        fwhm_nm: float = 30.0,
        span_nm: tuple[float, float] = (900.0, 940.0),
        step_nm: float = 0.002,
    ) -> EnsembleSpec:
        """A smooth Gaussian ensemble of unit peak density."""
        wavelengths = np.arange(span_nm[0], span_nm[1] + step_nm / 2, step_nm)
        sigma = fwhm_nm / (2.0 * math.sqrt(2.0 * math.log(2.0)))
        rho = np.exp(-0.5 * ((wavelengths - center_nm) / sigma) ** 2)
        return cls(
            wavelengths_nm=wavelengths,
            rho_qd=rho,
            area_total_nm2=area_total_nm2,
            area_cav_nm2=area_cav_nm2,
        )

    def rho(self, wavelength_nm):
        return np.interp(wavelength_nm, self.wavelengths_nm, self.rho_qd)


class EmissionSpectrum(ArrayRecord):
    """Collected emission Γ_lens(λ) split into cavity line and background."""

    wavelengths_nm: np.ndarray
    gamma_lens: np.ndarray
    cavity_term: np.ndarray
    background_term: np.ndarray

    @model_validator(mode="after")
    def _decomposed(self) -> EmissionSpectrum:
        shape = self.wavelengths_nm.shape
        if any(a.shape != shape for a in (self.gamma_lens, self.cavity_term, self.background_term)):
            raise ValueError("All spectrum columns must share the wavelength grid")
        if not np.allclose(self.gamma_lens, self.cavity_term + self.background_term, rtol=1e-12):
            raise ValueError("gamma_lens must equal cavity_term + background_term")
        if (self.cavity_term < 0).any() or (self.background_term < 0).any():
            raise ValueError("Spectrum terms must be non-negative")
        return self

    def scaled(self, gain: float) -> EmissionSpectrum:
        """The spectrum seen through a detector of relative gain `gain`."""
        return EmissionSpectrum(
            wavelengths_nm=self.wavelengths_nm,
            gamma_lens=self.gamma_lens * gain,
            cavity_term=self.cavity_term * gain,
            background_term=self.background_term * gain,
        )

    def to_csv(self, path: str | Path) -> None:
        table = np.column_stack(
            [self.wavelengths_nm, self.gamma_lens, self.cavity_term, self.background_term],
        )
        np.savetxt(
            path,
            table,
            delimiter=",",
            header="wavelength_nm,total,cavity_term,background",
            fmt="%.10g",
        )


class LorentzianFit(Spec):
    lambda_cav_nm: float
    q_factor: float
    peak: float
    background: float


def ensemble_spectrum(
    cavity: CavityParams,
    background: LeakyBackground,
    ensemble: EnsembleSpec,
) -> EmissionSpectrum:
    """Γ_lens(λ) ∝ ρ(λ)·[F_c0·η_cav·L(λ) + 2·F_PC·η_PC·A/A_cav].

    Only half the dots couple to the linearly polarised cavity mode while the
    leaky modes collect both polarisations, which leaves the factor 2 on the
    background.
    """
    wavelengths = ensemble.wavelengths_nm
    rho = ensemble.rho_qd
    f_c0 = max_purcell(cavity.q_factor, cavity.v_mode_norm)
    line = lorentzian(wavelengths, cavity.lambda_cav_nm, cavity.q_factor)
    cavity_term = rho * f_c0 * cavity.eta_cav * line
    ratio = ensemble.area_total_nm2 / ensemble.area_cav_nm2
    background_term = rho * 2.0 * background.f_pc * background.eta_pc * ratio
    return EmissionSpectrum(
        wavelengths_nm=wavelengths,
        gamma_lens=cavity_term + background_term,
        cavity_term=cavity_term,
        background_term=background_term,
    )


def _quadratic_peak(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    k = int(np.argmax(y))
    if k == 0 or k == len(y) - 1:
        raise PeakOnEdgeError(float(x[k]), (float(x[0]), float(x[-1])))
    a, b, c = np.polyfit(x[k - 1 : k + 2] - x[k], y[k - 1 : k + 2], 2)
    if a >= 0:
        return float(x[k]), float(y[k])
    shift = -b / (2 * a)
    return float(x[k] + shift), float(c - b**2 / (4 * a))


def peak_and_background(
    spectrum: EmissionSpectrum,
    q: float,
    line_nm: float | None = None,
) -> tuple[float, float, float]:
    """Peak wavelength, peak height and the background under the peak.

    The background is interpolated linearly between the means of two
    one-linewidth windows centred five linewidths either side of the peak.
    With `line_nm` the peak is read at that wavelength instead of searched for.

    :raises BackgroundWindowError: if a background window holds no samples.
    """
    x, y = spectrum.wavelengths_nm, spectrum.gamma_lens
    if line_nm is None:
        lam, peak = _quadratic_peak(x, y)
    else:
        lam, peak = line_nm, float(np.interp(line_nm, x, y))
    width = lam / q
    offset = BACKGROUND_OFFSET_LINEWIDTHS * width
    means = []
    for centre in (lam - offset, lam + offset):
        window = np.abs(x - centre) <= width / 2
        if not window.any():
            raise BackgroundWindowError(BACKGROUND_OFFSET_LINEWIDTHS, lam)
        means.append((float(x[window].mean()), float(y[window].mean())))
    (x1, y1), (x2, y2) = means
    bg = y1 + (y2 - y1) * (lam - x1) / (x2 - x1)
    return lam, peak, bg


def efficiency_ratio(
    spec_pert: EmissionSpectrum,
    spec_unpert: EmissionSpectrum,
    q_pert: float,
    q_unpert: float,
    rho_qd: EnsembleSpec,
    lines_nm: tuple[float, float] | None = None,
) -> float:
    """Cavity-channel collection efficiency of one design relative to another.

    Background-subtracted peak heights are corrected for the different Purcell
    enhancement (via Q) and for the ensemble density at each peak.

    :param lines_nm: known (perturbed, unperturbed) cavity wavelengths; the
        spectral maxima are used when omitted.
    :raises NegativeNumeratorError: if either background reaches its peak.
    """
    line_p, line_u = lines_nm or (None, None)
    lam_p, peak_p, bg_p = peak_and_background(spec_pert, q_pert, line_p)
    lam_u, peak_u, bg_u = peak_and_background(spec_unpert, q_unpert, line_u)
    if bg_p >= peak_p:
        raise NegativeNumeratorError(peak_p, bg_p, lam_p)
    if bg_u >= peak_u:
        raise NegativeNumeratorError(peak_u, bg_u, lam_u)
    ratio = (
        (peak_p - bg_p)
        / (peak_u - bg_u)
        * (q_unpert / q_pert)
        * (rho_qd.rho(lam_u) / rho_qd.rho(lam_p))
    )
    logger.info("Collection efficiency ratio %.3f (peaks at %.3f, %.3f nm)", ratio, lam_p, lam_u)
    return float(ratio)


def _line_model(u, centre, width, peak, background, slope):
    return peak / (1.0 + 4.0 * ((u - centre) / width) ** 2) + background + slope * u


def fit_lorentzian(spectrum: EmissionSpectrum, q_guess: float = 5000.0) -> LorentzianFit:
    """Least-squares fit of a Lorentzian on a sloped background around the peak.

    The fit runs in wavelength offsets from the highest sample, where the
    Lorentzian in λ/λ_cav has FWHM λ_cav/Q.

    :raises PeakOnEdgeError: if the highest sample ends the grid.
    :raises LineFitError: if the window is too sparse or the fit does not converge.
    """
    x, y = spectrum.wavelengths_nm, spectrum.gamma_lens
    lam0, peak0 = _quadratic_peak(x, y)
    width0 = lam0 / q_guess
    window = np.abs(x - lam0) <= 20 * width0
    bg0 = float(np.min(y[window]))
    if window.sum() < 5:
        raise LineFitError(lam0, f"only {int(window.sum())} samples within 20 linewidths")
    try:
        popt, _ = curve_fit(
            _line_model,
            x[window] - lam0,
            y[window],
            p0=[0.0, width0, peak0 - bg0, bg0, 0.0],
            maxfev=20000,
        )
    except RuntimeError as e:
        raise LineFitError(lam0, str(e)) from e
    centre, width, peak, bg, _ = popt
    lam = lam0 + centre
    return LorentzianFit(lambda_cav_nm=lam, q_factor=lam / abs(width), peak=peak, background=bg)
