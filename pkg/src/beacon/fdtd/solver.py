"""Two-dimensional TE Yee stepper (Ex, Ey, Hz) with a split-field PML.

Field layout on an (ny, nx) cell grid:

- Hz at cell centres, shape (ny, nx), split as Hz = Hzx + Hzy inside the PML
- Ex on horizontal cell edges, shape (ny + 1, nx)
- Ey on vertical cell edges, shape (ny, nx + 1)

The outermost edges are perfect electric conductor. With `boundary="pec"`
the PML is disabled and the discrete energy returned by `energy()` is
conserved to round-off once the source has switched off.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np

from ..units import angular_wavenumber
from .errors import CourantError, InstabilityError, RingUpError, SourcePlacementError
from .grid import Grid2D, ProbeSeries, SourceSpec

__all__ = ["YeeSimulation", "run_fdtd", "pml_profile"]

logger = logging.getLogger(__name__)

# Multiple of the source amplitude above which the run is declared divergent.
DIVERGENCE_FACTOR = 1e6
CHECK_EVERY = 64


def pml_profile(
    size: int,
    pml_cells: int,
    sigma_max: float,
    order: int,
    staggered: bool,
) -> np.ndarray:
    """Polynomial absorption rate along one axis.

    :param size: Number of cells along the axis.
    :param staggered: Sample at cell centres (`size` points) rather than at
        cell edges (`size + 1` points).
    """
    if pml_cells == 0 or sigma_max == 0:
        return np.zeros(size if staggered else size + 1)
    u = np.arange(size) + 0.5 if staggered else np.arange(size + 1, dtype=float)
    depth = np.maximum.reduce([pml_cells - u, u - (size - pml_cells), np.zeros_like(u)])
    return sigma_max * (depth / pml_cells) ** order


def _decay(sigma: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Exponential time-stepping factors a = exp(-σdt), b = (1 - a)/σ."""
    a = np.exp(-sigma * dt)
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.where(sigma > 0, (1.0 - a) / np.where(sigma > 0, sigma, 1.0), dt)
    return a, b


class YeeSimulation:
    """A time-stepped simulation of one grid driven by one source.

    Probes record the cell-centred component selected by the source
    polarisation. Running DFTs of that component over the whole grid can be
    registered with `add_dft` before calling `run`.
    """

    def __init__(
        self,
        grid: Grid2D,
        source: SourceSpec,
        probes: Sequence[tuple[int, int]] | None = None,
        record_energy: bool = False,
    ):
        if not 0 < grid.courant <= 1:
            raise CourantError(grid.courant)
        self.grid = grid
        self.source = source
        self.probes = tuple(tuple(p) for p in (probes or [source.position]))
        self.record_energy = record_energy
        for what, cell in [("Source", source.position), *(("Probe", p) for p in self.probes)]:
            if not grid.is_interior(cell):
                raise SourcePlacementError(what, cell, grid.epsilon.shape, grid.active_pml)
        ny, nx = grid.epsilon.shape
        self.dt = grid.dt_nm
        self.step_count = 0
        self.ex = np.zeros((ny + 1, nx))
        self.ey = np.zeros((ny, nx + 1))
        self.hzx = np.zeros((ny, nx))
        self.hzy = np.zeros((ny, nx))
        self.hz = np.zeros((ny, nx))
        self._dft: dict[float, tuple[int, np.ndarray]] = {}
        self._build_coefficients()
        self._build_source()

    def _build_coefficients(self) -> None:
        grid = self.grid
        eps = grid.epsilon
        ny, nx = eps.shape
        # Edge permittivities average the two cells sharing the edge.
        self.eps_ex = np.vstack([eps[:1], 0.5 * (eps[:-1] + eps[1:]), eps[-1:]])
        self.eps_ey = np.hstack([eps[:, :1], 0.5 * (eps[:, :-1] + eps[:, 1:]), eps[:, -1:]])
        pml = grid.active_pml
        sigma_max = grid.pml_sigma_max
        if sigma_max is None and pml:
            border = np.concatenate(
                [eps[:pml].ravel(), eps[-pml:].ravel(), eps[:, :pml].ravel(), eps[:, -pml:].ravel()],
            )
            sigma_max = 0.8 * (grid.pml_order + 1) / (grid.dx_nm * math.sqrt(border.mean()))
        sigma_max = sigma_max or 0.0
        profile = lambda size, staggered: pml_profile(  # noqa: E731
            size,
            pml,
            sigma_max,
            grid.pml_order,
            staggered,
        )
        dx, dt = grid.dx_nm, self.dt
        ah_x, bh_x = _decay(profile(nx, True), dt)
        ah_y, bh_y = _decay(profile(ny, True), dt)
        ae_x, be_x = _decay(profile(nx, False), dt)
        ae_y, be_y = _decay(profile(ny, False), dt)
        self._ah_x, self._bh_x = ah_x[None, :], (bh_x / dx)[None, :]
        self._ah_y, self._bh_y = ah_y[:, None], (bh_y / dx)[:, None]
        self._ae_x = ae_x[None, 1:-1]
        self._be_x = be_x[None, 1:-1] / (dx * self.eps_ey[:, 1:-1])
        self._ae_y = ae_y[1:-1, None]
        self._be_y = be_y[1:-1, None] / (dx * self.eps_ex[1:-1, :])

    def _build_source(self) -> None:
        src = self.source
        ny, nx = self.grid.epsilon.shape
        r, c = src.position
        if src.polarization == "y":
            rows = np.arange(ny) if src.line else np.array([r])
            self._src_field = self.ey
            self._src_index = (np.concatenate([rows, rows]), np.repeat([c, c + 1], len(rows)))
            eps = self.eps_ey[self._src_index]
        else:
            cols = np.arange(nx) if src.line else np.array([c])
            self._src_field = self.ex
            self._src_index = (np.repeat([r, r + 1], len(cols)), np.concatenate([cols, cols]))
            eps = self.eps_ex[self._src_index]
        # Half the drive goes to each edge of the source cell.
        self._src_weight = 0.5 * self.dt / eps
        self.turn_off_step = src.turn_off_step(self.dt)
        probe_rows, probe_cols = np.array(self.probes).T
        self._probe_index = (probe_rows, probe_cols)
        self._threshold = DIVERGENCE_FACTOR * max(src.amplitude, 1e-300)

    @property
    def time_nm(self) -> float:
        return self.step_count * self.dt

    def centred_field(self) -> np.ndarray:
        """The driven E component averaged onto cell centres."""
        if self.source.polarization == "y":
            return 0.5 * (self.ey[:, :-1] + self.ey[:, 1:])
        return 0.5 * (self.ex[:-1] + self.ex[1:])

    def add_dft(self, wavelength_nm: float, start_step: int = 0) -> None:
        """Accumulate exp(iωt)·E over the grid from `start_step` onward."""
        self._dft[float(wavelength_nm)] = (start_step, np.zeros(self.hz.shape, dtype=complex))

    def dft(self, wavelength_nm: float) -> np.ndarray:
        return self._dft[float(wavelength_nm)][1]

    def energy(self, hz_old: np.ndarray) -> float:
        """Discrete energy, conserved by the leapfrog scheme in a lossless grid.

        Must be called between the H and E half-steps with the H field of the
        previous half-step.
        """
        dx2 = self.grid.dx_nm**2
        return 0.5 * dx2 * float(
            np.sum(self.eps_ex * self.ex**2)
            + np.sum(self.eps_ey * self.ey**2)
            + np.sum(hz_old * self.hz),
        )

    def step(self) -> float | None:
        """Advance by one time step; return the discrete energy if recorded."""
        ex, ey = self.ex, self.ey
        hz_old = self.hz.copy() if self.record_energy else None
        self.hzx *= self._ah_x
        self.hzx -= self._bh_x * (ey[:, 1:] - ey[:, :-1])
        self.hzy *= self._ah_y
        self.hzy += self._bh_y * (ex[1:, :] - ex[:-1, :])
        np.add(self.hzx, self.hzy, out=self.hz)
        energy = self.energy(hz_old) if hz_old is not None else None
        hz = self.hz
        ex[1:-1, :] *= self._ae_y
        ex[1:-1, :] += self._be_y * (hz[1:, :] - hz[:-1, :])
        ey[:, 1:-1] *= self._ae_x
        ey[:, 1:-1] -= self._be_x * (hz[:, 1:] - hz[:, :-1])
        drive = self.source.waveform((self.step_count + 0.5) * self.dt)
        if drive:
            np.add.at(self._src_field, self._src_index, self._src_weight * drive)
        self.step_count += 1
        if self._dft:
            field = self.centred_field()
            for wavelength, (start, acc) in self._dft.items():
                if self.step_count > start:
                    phase = np.exp(1j * angular_wavenumber(wavelength) * self.time_nm)
                    acc += (phase * self.dt) * field
        return energy

    def _check_divergence(self) -> None:
        peak = max(np.abs(self.ex).max(), np.abs(self.ey).max())
        if not np.isfinite(peak) or peak > self._threshold:
            raise InstabilityError(self.step_count, float(peak), self._threshold)

    def run(self, steps: int) -> ProbeSeries:
        """Step `steps` times, sampling every probe after each step.

        :raises RingUpError: if the run stops before the source has switched off.
        :raises InstabilityError: if the fields diverge.
        """
        if steps < self.turn_off_step:
            raise RingUpError(steps, self.turn_off_step)
        samples = np.empty((steps, len(self.probes)))
        energy = np.empty(steps) if self.record_energy else None
        for n in range(steps):
            w = self.step()
            if energy is not None:
                energy[n] = w
            samples[n] = self.centred_field()[self._probe_index]
            if (n + 1) % CHECK_EVERY == 0:
                self._check_divergence()
        self._check_divergence()
        logger.debug("Ran %d steps (turn-off at step %d)", steps, self.turn_off_step)
        return ProbeSeries(
            positions=self.probes,
            samples=samples,
            dt=self.grid.dt_s,
            turn_off_step=self.turn_off_step,
            energy=energy,
            component="E" + self.source.polarization,
        )


def run_fdtd(
    grid: Grid2D,
    source: SourceSpec,
    steps: int,
    probes: Sequence[tuple[int, int]] | None = None,
    record_energy: bool = True,
) -> ProbeSeries:
    """Drive `grid` with `source` for `steps` steps and return the probe samples.

    :param grid: The computational domain.
    :param source: The soft source; probes default to its own cell.
    :param steps: Must cover at least the source ring-up.
    :param probes: Cells to sample.
    :param record_energy: Also record the discrete field energy at every step.
    """
    simulation = YeeSimulation(grid, source, probes=probes, record_energy=record_energy)
    return simulation.run(steps)
