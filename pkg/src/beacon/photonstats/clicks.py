"""Monte-Carlo click streams of a pulsed single-photon source behind an HBT splitter.

Pulses are simulated in fixed-size blocks. Each block draws from its own
generator seeded by (seed, block index), so a stream depends only on the seed
and never on how many workers produced it.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from enum import IntEnum
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed
from pydantic import model_validator

from ..models import ArrayRecord
from .errors import PulseConfigError
from .specs import DetectorSpec, EmitterDynamics, PulseTrainSpec, SpectralFilter

__all__ = [
    "ClickRecords",
    "Origin",
    "simulate_emission",
    "spectral_filter",
    "BLOCK_PULSES",
]

logger = logging.getLogger(__name__)

BLOCK_PULSES = 100_000
# A first emission within this many pulse widths can be followed by a second.
REEXCITE_WINDOW_FWHM = 2.0
MIN_PERIOD_LIFETIMES = 5.0


class Origin(IntEnum):
    QD = 0
    BACKGROUND = 1


class ClickRecords(ArrayRecord):
    """Detector clicks, sorted by time, with channel index, wavelength and origin tags."""

    channel: np.ndarray
    timestamp_ps: np.ndarray
    wavelength_nm: np.ndarray
    origin: np.ndarray
    labels: tuple[str, str] = ("A", "B")
    n_pulses: int = 0
    rep_rate_hz: float = 80e6

    @model_validator(mode="after")
    def _aligned(self) -> ClickRecords:
        n = self.timestamp_ps.shape
        arrays = (self.channel, self.wavelength_nm, self.origin)
        if self.timestamp_ps.ndim != 1 or any(a.shape != n for a in arrays):
            raise ValueError("Click columns must be 1D arrays of equal length")
        return self

    def __len__(self) -> int:
        return len(self.timestamp_ps)

    @property
    def rep_period_ps(self) -> float:
        return 1e12 / self.rep_rate_hz

    def select(self, mask: np.ndarray) -> ClickRecords:
        return self.model_copy(
            update={
                "channel": self.channel[mask],
                "timestamp_ps": self.timestamp_ps[mask],
                "wavelength_nm": self.wavelength_nm[mask],
                "origin": self.origin[mask],
            },
        )

    def channel_times(self, channel: int) -> np.ndarray:
        return self.timestamp_ps[self.channel == channel]

    def split(self) -> tuple[ClickRecords, ClickRecords]:
        """The two channels as separate streams, each relabelled as channel 0."""
        return tuple(
            self.select(self.channel == i).model_copy(
                update={"labels": (self.labels[i], self.labels[i])},
            )
            for i in (0, 1)
        )

    def counts_per_pulse(self) -> np.ndarray:
        """Number of clicks (both channels) in each pulse period."""
        index = np.floor(self.timestamp_ps / self.rep_period_ps).astype(np.int64)
        index = index[(index >= 0) & (index < self.n_pulses)]
        return np.bincount(index, minlength=self.n_pulses)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write("channel,timestamp_ps,wavelength_nm,origin\n")
            labels = np.asarray(self.labels)[self.channel]
            origins = np.where(self.origin == Origin.QD, "qd", "background")
            for row in zip(labels, self.timestamp_ps, self.wavelength_nm, origins):
                f.write("{},{:.3f},{:.6f},{}\n".format(*row))


def _cauchy(rng: np.random.Generator, centre: float, hwhm: float, n: int) -> np.ndarray:
    return centre + hwhm * rng.standard_cauchy(n)


def _simulate_block(
    block: int,
    start: int,
    stop: int,
    seed: int,
    pulses: PulseTrainSpec,
    dyn: EmitterDynamics,
    det: DetectorSpec,
    arm_filters: tuple[SpectralFilter | None, SpectralFilter | None],
) -> tuple[np.ndarray, ...]:
    rng = np.random.default_rng([seed, block])
    n = stop - start
    t_pulse = np.arange(start, stop) * pulses.rep_period_ps
    excited = rng.random(n) < dyn.p_excite
    first = rng.exponential(dyn.tau_ps, n)
    reexcite = (
        excited
        & (first < REEXCITE_WINDOW_FWHM * pulses.pulse_fwhm_ps)
        & (rng.random(n) < dyn.p_reexcite)
    )
    second = first + rng.exponential(dyn.tau_ps, n)
    qd_times = np.concatenate([t_pulse[excited] + first[excited], t_pulse[reexcite] + second[reexcite]])
    n_qd = len(qd_times)
    on_cavity = rng.random(n_qd) < dyn.cavity_feeding
    qd_lambda = np.where(
        on_cavity,
        _cauchy(rng, dyn.lambda_cav_nm, dyn.cav_hwhm_nm, n_qd),
        _cauchy(rng, dyn.lambda_qd_nm, dyn.qd_hwhm_nm, n_qd),
    )
    n_bg = rng.poisson(dyn.background_mean, n)
    bg_times = np.repeat(t_pulse, n_bg) + rng.exponential(dyn.tau_bg_ps, n_bg.sum())
    bg_lambda = _cauchy(rng, dyn.lambda_cav_nm, dyn.cav_hwhm_nm, len(bg_times))
    times = np.concatenate([qd_times, bg_times])
    wavelengths = np.concatenate([qd_lambda, bg_lambda])
    origin = np.concatenate(
        [np.full(n_qd, Origin.QD, np.int8), np.full(len(bg_times), Origin.BACKGROUND, np.int8)],
    )
    channel = (rng.random(len(times)) < 0.5).astype(np.int8)
    keep = rng.random(len(times)) < det.efficiency
    for arm, band in enumerate(arm_filters):
        if band is not None:
            keep &= (channel != arm) | (np.abs(wavelengths - band.center_nm) <= band.width_nm / 2)
    times = times[keep]
    if det.jitter_sigma_ps > 0:
        times = times + rng.normal(0.0, det.jitter_sigma_ps, len(times))
    return channel[keep], times, wavelengths[keep], origin[keep]


def _apply_dead_time(channel: np.ndarray, times: np.ndarray, dead_time_ps: float) -> np.ndarray:
    keep = np.ones(len(times), dtype=bool)
    last = {}
    for i, (ch, t) in enumerate(zip(channel.tolist(), times.tolist())):
        if ch in last and t - last[ch] < dead_time_ps:
            keep[i] = False
        else:
            last[ch] = t
    return keep


def simulate_emission(
    pulses: PulseTrainSpec,
    dyn: EmitterDynamics,
    det: DetectorSpec,
    seed: int,
    threads: int = 1,
    arm_filters: Sequence[SpectralFilter | None] | None = None,
    labels: tuple[str, str] = ("A", "B"),
) -> ClickRecords:
    """Generate the detector clicks of an HBT measurement.

    Per pulse the dot emits with probability `p_excite` after an Exp(τ) delay;
    an emission within two pulse widths may be followed, with probability
    `p_reexcite`, by a second photon. Poisson background photons decay with
    the cavity photon lifetime. Every photon meets a 50/50 splitter, an
    optional spectral filter in its arm, the detector efficiency and Gaussian
    timing jitter; dead time is applied per channel on the merged stream.

    :param seed: Fixes the stream completely, whatever `threads` is.
    :param threads: Worker threads for the pulse blocks.
    :param arm_filters: Optional band-pass per arm, e.g. dot and cavity lines
        for a cross-correlation.
    :raises PulseConfigError: if the repetition period is under five lifetimes.
    """
    if pulses.rep_period_ps < MIN_PERIOD_LIFETIMES * dyn.tau_ps:
        raise PulseConfigError(pulses.rep_period_ps, dyn.tau_ps)
    filters = tuple(arm_filters) if arm_filters is not None else (None, None)
    if len(filters) != 2:
        raise ValueError(f"arm_filters needs one entry per arm, got {len(filters)}")
    n_blocks = math.ceil(pulses.n_pulses / BLOCK_PULSES)
    blocks = Parallel(n_jobs=threads, prefer="threads")(
        delayed(_simulate_block)(
            b,
            b * BLOCK_PULSES,
            min((b + 1) * BLOCK_PULSES, pulses.n_pulses),
            seed,
            pulses,
            dyn,
            det,
            filters,
        )
        for b in range(n_blocks)
    )
    channel, times, wavelengths, origin = (np.concatenate(cols) for cols in zip(*blocks))
    order = np.argsort(times, kind="stable")
    channel, times, wavelengths, origin = channel[order], times[order], wavelengths[order], origin[order]
    if det.dead_time_ns > 0:
        keep = _apply_dead_time(channel, times, det.dead_time_ns * 1e3)
        channel, times, wavelengths, origin = channel[keep], times[keep], wavelengths[keep], origin[keep]
    logger.info(
        "Simulated %d pulses in %d blocks: %d clicks (%d background)",
        pulses.n_pulses,
        n_blocks,
        len(times),
        int((origin == Origin.BACKGROUND).sum()),
    )
    return ClickRecords(
        channel=channel,
        timestamp_ps=times,
        wavelength_nm=wavelengths,
        origin=origin,
        labels=labels,
        n_pulses=pulses.n_pulses,
        rep_rate_hz=pulses.rep_rate_hz,
    )


def spectral_filter(clicks: ClickRecords, center_nm: float, width_nm: float) -> ClickRecords:
    """Keep the clicks whose photon wavelength lies within width/2 of `center_nm`."""
    return clicks.select(np.abs(clicks.wavelength_nm - center_nm) <= width_nm / 2)
