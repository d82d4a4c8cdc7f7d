from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np
from pydantic import Field, model_validator

from ..models import ArrayRecord, complex_from_parts
from .grid import Grid2D, SourceSpec
from .resonance import find_resonance
from .solver import YeeSimulation

__all__ = ["ResonanceResult", "extract_mode", "read_mode_csv", "mode_volume"]

logger = logging.getLogger(__name__)


class ResonanceResult(ArrayRecord):
    """A cavity mode: resonance, quality factor and normalised E phasor."""

    lambda_cav_nm: float = Field(gt=0)
    q_factor: float = Field(gt=0)
    mode_field: np.ndarray
    v_mode_norm: float = Field(gt=0)
    q_inplane: float | None = None
    fit_residual: float | None = None
    eps_mean: float = 1.0
    mode_power: float = 0.0
    dx_nm: float = Field(gt=0)
    origin: tuple[int, int]
    a_nm: float | None = None
    n_eff: float | None = None

    @model_validator(mode="after")
    def _check_field(self) -> ResonanceResult:
        if self.mode_field.ndim != 2:
            raise ValueError(f"mode_field must be 2D, got shape {self.mode_field.shape}")
        peak = np.abs(self.mode_field).max()
        if not math.isclose(peak, 1.0, rel_tol=1e-9):
            raise ValueError(f"mode_field must have max |E| = 1, got {peak}")
        return self

    @property
    def shape(self) -> tuple[int, int]:
        return self.mode_field.shape

    def to_csv(self, path: str | Path) -> None:
        """Write the field as (row, col, re, im) rows with a header giving dx, λ and Q."""
        rows, cols = np.indices(self.shape)
        field = self.mode_field.ravel()
        header = (
            f"dx_nm={self.dx_nm!r},lambda_cav_nm={self.lambda_cav_nm!r},"
            f"q_factor={self.q_factor!r},origin_row={self.origin[0]},"
            f"origin_col={self.origin[1]},rows={self.shape[0]},cols={self.shape[1]}\n"
            "row,col,re,im"
        )
        table = np.column_stack([rows.ravel(), cols.ravel(), field.real, field.imag])
        np.savetxt(path, table, delimiter=",", header=header, fmt=["%d", "%d", "%.12g", "%.12g"])


def read_mode_csv(path: str | Path) -> dict:
    """Read a mode CSV back into its header values and complex field."""
    with open(path, encoding="utf-8") as f:
        meta = dict(item.split("=") for item in f.readline().lstrip("# ").strip().split(","))
    table = np.loadtxt(path, delimiter=",", comments="#")
    shape = int(meta["rows"]), int(meta["cols"])
    field = complex_from_parts(table[:, 2], table[:, 3]).reshape(shape)
    return {
        "dx_nm": float(meta["dx_nm"]),
        "lambda_cav_nm": float(meta["lambda_cav_nm"]),
        "q_factor": float(meta["q_factor"]),
        "origin": (int(meta["origin_row"]), int(meta["origin_col"])),
        "mode_field": field,
    }


def mode_volume(
    field: np.ndarray,
    epsilon: np.ndarray,
    dx_nm: float,
    wavelength_nm: float,
    n_eff: float,
) -> float:
    """Reduced 2D mode area ∫ε|E|²dA / max(ε|E|²), in units of (λ/n)²."""
    density = epsilon * np.abs(field) ** 2
    area = density.sum() * dx_nm**2 / density.max()
    return float(area / (wavelength_nm / n_eff) ** 2)


def extract_mode(
    grid: Grid2D,
    source: SourceSpec,
    lambda_cav: float,
    ring_cycles: int = 100,
    search_halfwidth: float = 0.05,
    a_nm: float | None = None,
    q_ceiling: float = 1e7,
) -> ResonanceResult:
    """Rerun the simulation and record the mode as a running DFT at `lambda_cav`.

    The DFT accumulates only after the source has switched off, so it holds
    the freely ringing mode. The same run's probe at the source cell yields
    the in-plane Q.

    :param grid: The computational domain.
    :param source: The excitation used to find the resonance.
    :param lambda_cav: Resonance wavelength from `find_resonance`.
    :param ring_cycles: Optical cycles to accumulate after turn-off.
    :param search_halfwidth: Fractional half-width of the window used to refit Q.
    :param a_nm: Lattice constant carried on the result for aperture composition.
    """
    simulation = YeeSimulation(grid, source, probes=[source.position])
    turn_off = simulation.turn_off_step
    steps = turn_off + math.ceil(ring_cycles * lambda_cav / simulation.dt)
    simulation.add_dft(lambda_cav, start_step=turn_off)
    series = simulation.run(steps)
    window = (lambda_cav * (1 - search_halfwidth), lambda_cav * (1 + search_halfwidth))
    fit = find_resonance(series, window, q_ceiling=q_ceiling)
    field = simulation.dft(lambda_cav)
    peak = np.unravel_index(np.argmax(np.abs(field)), field.shape)
    field = field / field[peak]
    n_eff = grid.n_eff or math.sqrt(grid.epsilon.max())
    intensity = np.abs(field) ** 2
    eps_mean = float((grid.epsilon * intensity).sum() / intensity.sum())
    v_mode = mode_volume(field, grid.epsilon, grid.dx_nm, lambda_cav, n_eff)
    logger.info(
        "Mode at %.2f nm: Q_inplane = %.4g, V' = %.3f (λ/n)², antinode at cell %s",
        lambda_cav,
        fit.q_factor,
        v_mode,
        tuple(int(i) for i in peak),
    )
    return ResonanceResult(
        lambda_cav_nm=lambda_cav,
        q_factor=fit.q_factor,
        mode_field=field,
        v_mode_norm=v_mode,
        q_inplane=fit.q_factor,
        fit_residual=fit.fit_residual,
        eps_mean=eps_mean,
        mode_power=float(intensity.sum()),
        dx_nm=grid.dx_nm,
        origin=grid.centre,
        a_nm=a_nm,
        n_eff=n_eff,
    )
