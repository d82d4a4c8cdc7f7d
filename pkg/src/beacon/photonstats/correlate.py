"""All-pairs coincidence histograms and the g2(0) peak-area estimator."""

from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np
from pydantic import Field, model_validator

from ..models import ArrayRecord, Spec
from .clicks import ClickRecords
from .errors import EmptyChannelError, InsufficientStatisticsError

__all__ = [
    "CorrelationHistogram",
    "G2Result",
    "correlate_times",
    "hbt_correlate",
    "cross_correlate",
    "g2_zero",
    "MIN_SIDE_PEAK_COUNTS",
]

logger = logging.getLogger(__name__)

MIN_SIDE_PEAK_COUNTS = 100.0
MIN_WINDOW_PERIODS = 5.0


class CorrelationHistogram(ArrayRecord):
    """Coincidence counts against delay t' = t_A - t_B, bins centred on multiples of the bin width."""

    bin_width_ps: float = Field(gt=0)
    window_ps: float = Field(gt=0)
    counts: np.ndarray
    n_pulses: int = 0
    rep_rate_hz: float = Field(80e6, gt=0)
    channels: tuple[str, str] = ("A", "B")

    @model_validator(mode="after")
    def _check(self) -> CorrelationHistogram:
        if self.counts.shape != (2 * self.half_bins + 1,):
            raise ValueError(
                f"counts must have {2 * self.half_bins + 1} bins, got {self.counts.shape}",
            )
        if (self.counts < 0).any():
            raise ValueError("counts must be non-negative")
        return self

    @property
    def half_bins(self) -> int:
        return int(math.floor(self.window_ps / self.bin_width_ps))

    @property
    def bin_centers_ps(self) -> np.ndarray:
        return np.arange(-self.half_bins, self.half_bins + 1) * self.bin_width_ps

    @property
    def rep_period_ps(self) -> float:
        return 1e12 / self.rep_rate_hz

    def to_csv(self, path: str | Path) -> None:
        np.savetxt(
            path,
            np.column_stack([self.bin_centers_ps, self.counts]),
            delimiter=",",
            header="bin_center_ps,counts",
            fmt=["%.3f", "%d"],
        )


class G2Result(Spec):
    g2_zero: float = Field(ge=0)
    central_area: float
    side_areas: tuple[float, ...]
    mean_side_area: float
    statistical_error: float


def correlate_times(
    times_a: np.ndarray,
    times_b: np.ndarray,
    bin_width_ps: float,
    window_ps: float,
) -> np.ndarray:
    """Histogram every pair delay t_a - t_b with |delay| <= window.

    Both inputs must be sorted. Each click of A is matched against the slice of
    B inside its window, one offset at a time, so the cost scales with the
    number of pairs rather than with len(A)·len(B).
    """
    half = int(math.floor(window_ps / bin_width_ps))
    counts = np.zeros(2 * half + 1, dtype=np.int64)
    lo = np.searchsorted(times_b, times_a - window_ps, side="left")
    hi = np.searchsorted(times_b, times_a + window_ps, side="right")
    span = int((hi - lo).max(initial=0))
    for k in range(span):
        idx = lo + k
        valid = idx < hi
        delay = times_a[valid] - times_b[idx[valid]]
        bins = np.floor(delay / bin_width_ps + 0.5).astype(np.int64) + half
        bins = bins[(bins >= 0) & (bins <= 2 * half)]
        counts += np.bincount(bins, minlength=2 * half + 1)
    return counts


def _histogram(
    times_a: np.ndarray,
    times_b: np.ndarray,
    labels: tuple[str, str],
    bin_width_ps: float,
    window_ps: float | None,
    n_pulses: int,
    rep_rate_hz: float,
) -> CorrelationHistogram:
    for times, label in zip((times_a, times_b), labels):
        if not len(times):
            raise EmptyChannelError(label)
    period = 1e12 / rep_rate_hz
    window_ps = window_ps or (MIN_WINDOW_PERIODS + 0.5) * period
    if window_ps < MIN_WINDOW_PERIODS * period:
        raise ValueError(
            f"A {window_ps:.0f} ps window spans fewer than {MIN_WINDOW_PERIODS:g} "
            f"repetition periods of {period:.0f} ps",
        )
    counts = correlate_times(np.sort(times_a), np.sort(times_b), bin_width_ps, window_ps)
    logger.debug("Correlated %d x %d clicks: %d pairs", len(times_a), len(times_b), counts.sum())
    return CorrelationHistogram(
        bin_width_ps=bin_width_ps,
        window_ps=window_ps,
        counts=counts,
        n_pulses=n_pulses,
        rep_rate_hz=rep_rate_hz,
        channels=labels,
    )


def hbt_correlate(
    clicks: ClickRecords,
    bin_width_ps: float = 32.0,
    window_ps: float | None = None,
) -> CorrelationHistogram:
    """Autocorrelation of the two HBT arms.

    :param window_ps: Defaults to 5.5 repetition periods.
    :raises EmptyChannelError: if either arm has no clicks.
    """
    return _histogram(
        clicks.channel_times(0),
        clicks.channel_times(1),
        clicks.labels,
        bin_width_ps,
        window_ps,
        clicks.n_pulses,
        clicks.rep_rate_hz,
    )


def cross_correlate(
    clicks_qd: ClickRecords,
    clicks_cav: ClickRecords,
    bin_width_ps: float = 32.0,
    window_ps: float | None = None,
) -> CorrelationHistogram:
    """Cross-correlation between two spectral channels, using every click of each."""
    return _histogram(
        clicks_qd.timestamp_ps,
        clicks_cav.timestamp_ps,
        ("QD", "CAV"),
        bin_width_ps,
        window_ps,
        max(clicks_qd.n_pulses, clicks_cav.n_pulses),
        clicks_qd.rep_rate_hz,
    )


def g2_zero(hist: CorrelationHistogram, rep_rate_hz: float | None = None) -> G2Result:
    """Central over mean side peak area, each integrated over one repetition period.

    Peak k covers delays in (kT - T/2, kT + T/2], so a bin on a boundary goes
    to the lower-delay peak. The error is Poisson counting on the central and
    side areas.

    :raises InsufficientStatisticsError: if fewer than two side peaks fit on each
        side, or the mean side peak holds under 100 counts.
    """
    period = 1e12 / (rep_rate_hz or hist.rep_rate_hz)
    n_side = int(math.floor((hist.window_ps - period / 2) / period))
    if n_side < 2:
        raise InsufficientStatisticsError(
            f"a {hist.window_ps:.0f} ps window holds {max(n_side, 0)} side peaks per side",
        )
    centers = hist.bin_centers_ps
    peak_of = np.ceil(centers / period - 0.5).astype(np.int64)
    in_range = np.abs(peak_of) <= n_side
    areas = np.bincount(
        peak_of[in_range] + n_side,
        weights=hist.counts[in_range],
        minlength=2 * n_side + 1,
    )
    central = float(areas[n_side])
    sides = np.delete(areas, n_side)
    mean_side = float(sides.mean())
    if mean_side < MIN_SIDE_PEAK_COUNTS:
        raise InsufficientStatisticsError(
            f"mean side peak area {mean_side:.1f} is below {MIN_SIDE_PEAK_COUNTS:g} counts",
        )
    g2 = central / mean_side
    variance = (max(central, 1.0) / mean_side**2) * (1.0 + central / (len(sides) * mean_side))
    logger.info("g2(0) = %.4f ± %.4f from %d side peaks", g2, math.sqrt(variance), len(sides))
    return G2Result(
        g2_zero=g2,
        central_area=central,
        side_areas=tuple(float(s) for s in sides),
        mean_side_area=mean_side,
        statistical_error=math.sqrt(variance),
    )
