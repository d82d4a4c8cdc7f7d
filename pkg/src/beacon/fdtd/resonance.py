"""Resonance wavelength and quality factor from a probe ring-down.

The dominant spectral peak in a wavelength window is located on a zero-padded
spectrum of the post-turn-off samples. Its amplitude envelope is isolated with
a Gaussian band-pass in the analytic-signal domain, and the Q factor follows
from a straight-line fit to the logarithm of the envelope energy.
"""

from __future__ import annotations

import logging
import math
import warnings

import numpy as np
from pydantic import Field
from scipy import fft
from scipy.signal import find_peaks, hilbert

from ..models import Spec
from ..units import C_NM_PER_S
from .errors import AmbiguousFitError, NoResonanceError, ShortSeriesError
from .grid import ProbeSeries

__all__ = [
    "SpectralPeak",
    "RingDownFit",
    "find_resonances",
    "find_resonance",
    "linewidth_q",
    "MIN_RINGDOWN_CYCLES",
]

logger = logging.getLogger(__name__)

MIN_RINGDOWN_CYCLES = 10
PAD_FACTOR = 8
# Filter edge effects are ignored for this many kernel widths at each end.
EDGE_SIGMAS = 4.0
# Samples below this fraction of the peak energy are treated as noise floor.
ENERGY_FLOOR = 1e-8


class SpectralPeak(Spec):
    wavelength_nm: float
    frequency_hz: float
    power: float
    prominence: float
    fwhm_hz: float


class RingDownFit(Spec):
    """The outcome of a ring-down analysis."""

    lambda_nm: float
    q_factor: float
    fit_residual: float = Field(description="RMS residual of the log-energy fit.")
    tau_e_s: float = Field(description="Energy decay time; infinite if no decay.")
    q_linewidth: float | None = Field(
        None,
        description="Q from the spectral FWHM, when the line is resolved.",
    )
    peak: SpectralPeak


def _ringdown(series: ProbeSeries, probe: int) -> np.ndarray:
    return np.asarray(series.samples[series.turn_off_step :, probe], dtype=float)


def _spectrum(x: np.ndarray, dt: float, window: bool = False) -> tuple[np.ndarray, np.ndarray]:
    nfft = fft.next_fast_len(PAD_FACTOR * len(x))
    if window:
        x = x * np.hanning(len(x))
    power = np.abs(fft.rfft(x, n=nfft)) ** 2
    freqs = fft.rfftfreq(nfft, dt)
    return freqs, power


def _interpolate_peak(freqs: np.ndarray, power: np.ndarray, k: int) -> float:
    if k <= 0 or k >= len(power) - 1:
        return float(freqs[k])
    lo, mid, hi = np.log(np.maximum(power[k - 1 : k + 2], 1e-300))
    denom = lo - 2 * mid + hi
    shift = 0.5 * (lo - hi) / denom if denom < 0 else 0.0
    return float(freqs[k] + shift * (freqs[1] - freqs[0]))


def _fwhm(freqs: np.ndarray, power: np.ndarray, f0: float) -> float:
    k = int(np.argmin(np.abs(freqs - f0)))
    k = max(k - 2, 0) + int(np.argmax(power[max(k - 2, 0) : k + 3]))
    half = power[k] / 2
    lo = k
    while lo > 0 and power[lo] > half:
        lo -= 1
    hi = k
    while hi < len(power) - 1 and power[hi] > half:
        hi += 1
    return float(freqs[hi] - freqs[lo])


def find_resonances(
    series: ProbeSeries,
    search_window_nm: tuple[float, float],
    probe: int = 0,
    prominence: float = 100.0,
    max_modes: int | None = None,
) -> list[SpectralPeak]:
    """List the spectral peaks in the window, strongest first.

    Peaks are found on a Hann-windowed spectrum; prominence is the peak power
    over the median power of the whole spectrum. A peak must also fall to half
    its height on both sides before meeting a higher one, and peaks closer
    than four resolution bins to a stronger one are dropped.

    :raises ShortSeriesError: if fewer than ten cycles follow turn-off.
    :raises NoResonanceError: if no peak clears `prominence`.
    """
    lo_nm, hi_nm = sorted(search_window_nm)
    x = _ringdown(series, probe)
    duration = len(x) * series.dt
    periods = duration * C_NM_PER_S / hi_nm
    if periods < MIN_RINGDOWN_CYCLES:
        raise ShortSeriesError(periods, MIN_RINGDOWN_CYCLES)
    freqs, power = _spectrum(x, series.dt, window=True)
    raw_freqs, raw_power = _spectrum(x, series.dt)
    f_lo, f_hi = C_NM_PER_S / hi_nm, C_NM_PER_S / lo_nm
    in_window = (freqs >= f_lo) & (freqs <= f_hi)
    baseline = float(np.median(power[1:]))
    floor = prominence * baseline if baseline > 0 else np.finfo(float).tiny
    indices, props = find_peaks(power, height=floor, prominence=0.0)
    # Ripple on a line's tail never dips to half its own height.
    distinct = props["prominences"] >= 0.5 * props["peak_heights"]
    indices = indices[distinct & in_window[indices]]
    if not len(indices):
        best = power[in_window].max() / baseline if in_window.any() and baseline > 0 else 0.0
        raise NoResonanceError((lo_nm, hi_nm), prominence, float(best))
    peaks: list[SpectralPeak] = []
    for k in indices[np.argsort(power[indices])[::-1]]:
        f0 = _interpolate_peak(freqs, power, k)
        if any(abs(f0 - p.frequency_hz) < 4.0 / duration for p in peaks):
            continue
        peaks.append(
            SpectralPeak(
                wavelength_nm=C_NM_PER_S / f0,
                frequency_hz=f0,
                power=float(power[k]),
                prominence=float(power[k] / baseline) if baseline > 0 else math.inf,
                fwhm_hz=_fwhm(raw_freqs, raw_power, f0),
            ),
        )
        if max_modes is not None and len(peaks) >= max_modes:
            break
    return peaks


def linewidth_q(series: ProbeSeries, peak: SpectralPeak) -> float | None:
    """Q = f0/FWHM, or None when the line is narrower than the spectral resolution."""
    resolution = 1.0 / (series.dt * (series.steps - series.turn_off_step))
    if peak.fwhm_hz <= 2 * resolution:
        return None
    return peak.frequency_hz / peak.fwhm_hz


def _envelope_energy(
    x: np.ndarray,
    dt: float,
    f0: float,
    sigma_f: float,
) -> np.ndarray:
    # Zero padding keeps the filter and the Hilbert transform from wrapping the tail onto the head.
    nfft = fft.next_fast_len(4 * len(x))
    gain = np.exp(-0.5 * ((fft.rfftfreq(nfft, dt) - f0) / sigma_f) ** 2)
    filtered = fft.irfft(fft.rfft(x, n=nfft) * gain, n=nfft)
    analytic = hilbert(filtered)[: len(x)]
    return np.abs(analytic) ** 2


def find_resonance(
    series: ProbeSeries,
    search_window_nm: tuple[float, float],
    probe: int = 0,
    prominence: float = 100.0,
    fit_tolerance: float = 0.1,
    q_ceiling: float = 1e7,
) -> RingDownFit:
    """Locate the dominant resonance in a window and measure its Q.

    :param series: Probe samples; only those after source turn-off are used.
    :param search_window_nm: Wavelength bounds (either order).
    :param probe: Column of `series.samples` to analyse.
    :param prominence: Minimum peak over median spectral power.
    :param fit_tolerance: Largest RMS residual of the log-energy fit.
    :param q_ceiling: Reported when no decay is measurable.
    :raises ShortSeriesError: if fewer than ten cycles follow turn-off.
    :raises NoResonanceError: if no peak in the window clears `prominence`.
    :raises AmbiguousFitError: if the envelope energy is not a single exponential.
    """
    peaks = find_resonances(series, search_window_nm, probe, prominence)
    peak = peaks[0]
    x = _ringdown(series, probe)
    dt = series.dt
    duration = len(x) * dt
    lo_nm, hi_nm = sorted(search_window_nm)
    quarter_window = 0.25 * (C_NM_PER_S / lo_nm - C_NM_PER_S / hi_nm)
    sigma_f = max(min(2.0 * peak.fwhm_hz, quarter_window), 4.0 / duration)
    energy = _envelope_energy(x, dt, peak.frequency_hz, sigma_f)
    edge = math.ceil(EDGE_SIGMAS / (2 * math.pi * sigma_f * dt))
    t = np.arange(len(x)) * dt
    usable = np.zeros(len(x), dtype=bool)
    usable[edge : len(x) - edge] = True
    usable &= energy > ENERGY_FLOOR * energy[usable].max(initial=0.0)
    if usable.sum() < 10:
        raise AmbiguousFitError(math.inf, fit_tolerance, int(usable.sum()))
    log_energy = np.log(energy[usable])
    slope, intercept = np.polyfit(t[usable], log_energy, 1)
    residual = float(np.sqrt(np.mean((log_energy - (slope * t[usable] + intercept)) ** 2)))
    if residual > fit_tolerance:
        raise AmbiguousFitError(residual, fit_tolerance, int(usable.sum()))
    omega = 2 * math.pi * peak.frequency_hz
    if slope >= 0 or omega / -slope > q_ceiling:
        warnings.warn(
            f"No measurable decay at {peak.wavelength_nm:.2f} nm; reporting Q = {q_ceiling:g}",
            stacklevel=2,
        )
        q_factor, tau_e = q_ceiling, math.inf
    else:
        tau_e = -1.0 / slope
        q_factor = omega * tau_e
    logger.info(
        "Resonance at %.3f nm with Q = %.4g (fit residual %.2g)",
        peak.wavelength_nm,
        q_factor,
        residual,
    )
    return RingDownFit(
        lambda_nm=peak.wavelength_nm,
        q_factor=q_factor,
        fit_residual=residual,
        tau_e_s=tau_e,
        q_linewidth=linewidth_q(series, peak),
        peak=peak,
    )
