"""Time-resolved photoluminescence: arrival-time histograms and lifetime fits."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from pydantic import Field
from scipy.optimize import curve_fit
from scipy.stats import exponnorm

from ..models import ArrayRecord, Spec
from .clicks import ClickRecords
from .errors import DecayFitError, EmptyChannelError
from .specs import DetectorSpec

__all__ = ["DecayHistogram", "DecayFit", "decay_histogram", "fit_decay"]

# Share of the period placed before the pulse so early jittered clicks are kept.
LEAD_FRACTION = 0.1


class DecayHistogram(ArrayRecord):
    """Click arrival times relative to the preceding laser pulse."""

    bin_width_ps: float = Field(gt=0)
    bin_centers_ps: np.ndarray
    counts: np.ndarray

    def to_csv(self, path: str | Path) -> None:
        np.savetxt(
            path,
            np.column_stack([self.bin_centers_ps, self.counts]),
            delimiter=",",
            header="delay_ps,counts",
            fmt=["%.3f", "%d"],
        )


class DecayFit(Spec):
    tau_ps: float
    tau_error_ps: float
    t0_ps: float
    amplitude: float
    background: float


def decay_histogram(
    clicks: ClickRecords,
    rep_rate_hz: float | None = None,
    bin_width_ps: float = 4.0,
) -> DecayHistogram:
    """Fold all clicks onto one repetition period.

    :raises EmptyChannelError: if there are no clicks.
    """
    if not len(clicks):
        raise EmptyChannelError(clicks.labels[0])
    period = 1e12 / (rep_rate_hz or clicks.rep_rate_hz)
    lead = LEAD_FRACTION * period
    phase = np.mod(clicks.timestamp_ps + lead, period) - lead
    edges = np.arange(-lead, period - lead + bin_width_ps / 2, bin_width_ps)
    counts, edges = np.histogram(phase, bins=edges)
    return DecayHistogram(
        bin_width_ps=bin_width_ps,
        bin_centers_ps=0.5 * (edges[:-1] + edges[1:]),
        counts=counts,
    )


def _model(t, amplitude, tau, t0, background, sigma):
    return amplitude * exponnorm.pdf(t, tau / sigma, loc=t0, scale=sigma) + background


def fit_decay(hist: DecayHistogram, det: DetectorSpec | None = None) -> DecayFit:
    """Fit an exponential decay convolved with the detector's Gaussian jitter.

    The jitter width is held at the detector's value, so the fitted lifetime
    can be shorter than the instrument response.

    :raises DecayFitError: if the fit does not converge or leaves the lifetime
        undetermined.
    """
    sigma = max(det.jitter_sigma_ps if det else 0.0, hist.bin_width_ps / 2)
    t, y = hist.bin_centers_ps, hist.counts.astype(float)
    total = y.sum() * hist.bin_width_ps
    background0 = float(np.median(y[t < -2 * sigma])) if (t < -2 * sigma).any() else 0.0
    tail = t > t[np.argmax(y)]
    excess = np.clip(y[tail] - background0, 0, None)
    tau0 = max(float(np.sum(excess * (t[tail] - t[np.argmax(y)])) / max(excess.sum(), 1.0)), hist.bin_width_ps)
    try:
        popt, pcov = curve_fit(
            lambda t, a, tau, t0, bg: _model(t, a, tau, t0, bg, sigma),
            t,
            y,
            p0=[total, tau0, 0.0, background0],
            bounds=([0, 1e-3, -10 * sigma, 0], [np.inf, np.inf, 10 * sigma, np.inf]),
            sigma=np.sqrt(np.maximum(y, 1.0)),
            absolute_sigma=True,
        )
    except RuntimeError as e:
        raise DecayFitError(str(e)) from e
    amplitude, tau, t0, background = popt
    if not np.isfinite(pcov[1, 1]):
        raise DecayFitError(f"lifetime {tau:.4g} ps has no finite error estimate")
    return DecayFit(
        tau_ps=float(tau),
        tau_error_ps=float(math.sqrt(pcov[1, 1])),
        t0_ps=float(t0),
        amplitude=float(amplitude),
        background=float(background),
    )
