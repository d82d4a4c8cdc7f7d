from __future__ import annotations

import math
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import Field, model_validator

from ..geometry import PermittivityMap
from ..models import ArrayRecord, Spec
from ..units import C_NM_PER_S, angular_wavenumber

__all__ = ["Grid2D", "SourceSpec", "ProbeSeries"]


class Grid2D(ArrayRecord):
    """The FDTD computational domain.

    Cells are indexed (row, column) = (y, x). Lengths are in nm and the solver
    clock runs in nm of light travel, so c = 1 inside the stepper.
    """

    dx_nm: float = Field(gt=0)
    epsilon: np.ndarray
    pml_cells: int = Field(10, ge=0)
    pml_order: int = Field(3, ge=1)
    pml_sigma_max: float | None = Field(
        None,
        description="Peak PML decay rate per nm of light travel; None picks the "
        "usual 0.8·(order+1)/(n·dx).",
    )
    boundary: Literal["pml", "pec"] = "pml"
    courant: float = 0.99
    n_eff: float | None = None
    origin: tuple[int, int] | None = None

    @model_validator(mode="after")
    def _check(self) -> Grid2D:
        if self.epsilon.ndim != 2:
            raise ValueError(f"epsilon must be 2D, got shape {self.epsilon.shape}")
        if (self.epsilon < 1.0 - 1e-12).any():
            raise ValueError("epsilon must be >= 1 everywhere")
        if self.boundary == "pml" and self.pml_cells < 8:
            raise ValueError(f"pml_cells={self.pml_cells}; at least 8 are required")
        if min(self.epsilon.shape) <= 2 * self.active_pml:
            raise ValueError("The grid is too small to hold its PML")
        return self

    @classmethod
    def from_permittivity(cls, pmap: PermittivityMap, **kwargs) -> Grid2D:
        return cls(
            dx_nm=pmap.dx_nm,
            epsilon=pmap.epsilon,
            pml_cells=pmap.pml_cells,
            n_eff=pmap.n_eff,
            origin=pmap.origin,
            **kwargs,
        )

    @property
    def height(self) -> int:
        return self.epsilon.shape[0]

    @property
    def width(self) -> int:
        return self.epsilon.shape[1]

    @property
    def active_pml(self) -> int:
        return self.pml_cells if self.boundary == "pml" else 0

    @property
    def centre(self) -> tuple[int, int]:
        return self.origin if self.origin is not None else (self.height // 2, self.width // 2)

    @property
    def dt_nm(self) -> float:
        """Time step in nm of light travel."""
        return self.courant * self.dx_nm / math.sqrt(2.0)

    @property
    def dt_s(self) -> float:
        return self.dt_nm / C_NM_PER_S

    def is_interior(self, cell: tuple[int, int]) -> bool:
        pml = self.active_pml
        r, c = cell
        return pml <= r < self.height - pml and pml <= c < self.width - pml


class SourceSpec(Spec):
    """A soft current source driving one in-plane E component.

    The time profile is a Gaussian-modulated sinusoid whose envelope
    exp(-((t - t0)/τ)²) spans `bandwidth_nm` around `center_wavelength_nm`; it
    is switched off at t = 2·t0.
    """

    position: tuple[int, int]
    polarization: Literal["x", "y"] = "y"
    center_wavelength_nm: float = Field(gt=0)
    bandwidth_nm: float = Field(gt=0)
    amplitude: float = Field(1.0, ge=0)
    line: bool = Field(
        False,
        description="Drive the whole column (y) or row (x) through `position`.",
    )

    @property
    def omega0(self) -> float:
        """Carrier angular frequency in rad per nm of light travel."""
        return angular_wavenumber(self.center_wavelength_nm)

    @property
    def tau_nm(self) -> float:
        return 2.0 * self.center_wavelength_nm**2 / (math.pi * self.bandwidth_nm)

    @property
    def t0_nm(self) -> float:
        return 4.0 * self.tau_nm

    @property
    def turn_off_nm(self) -> float:
        return 2.0 * self.t0_nm

    def turn_off_step(self, dt_nm: float) -> int:
        return math.ceil(self.turn_off_nm / dt_nm)

    def waveform(self, t_nm: float) -> float:
        if t_nm >= self.turn_off_nm:
            return 0.0
        envelope = math.exp(-(((t_nm - self.t0_nm) / self.tau_nm) ** 2))
        return self.amplitude * envelope * math.sin(self.omega0 * t_nm)


class ProbeSeries(ArrayRecord):
    """Cell-centred field samples recorded once per time step."""

    positions: tuple[tuple[int, int], ...]
    samples: np.ndarray
    dt: float = Field(gt=0, description="Time step in seconds.")
    turn_off_step: int = 0
    energy: np.ndarray | None = None
    component: str = "Ey"

    @model_validator(mode="after")
    def _check(self) -> ProbeSeries:
        if self.samples.ndim != 2 or self.samples.shape[1] != len(self.positions):
            raise ValueError(
                f"samples must have shape (steps, {len(self.positions)}), got "
                f"{self.samples.shape}",
            )
        return self

    @property
    def steps(self) -> int:
        return self.samples.shape[0]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.steps) * self.dt

    def to_csv(self, path: str | Path) -> None:
        columns = [f"p{r}_{c}" for r, c in self.positions]
        data = self.samples
        if self.energy is not None:
            columns.append("energy")
            data = np.column_stack([data, self.energy])
        header = f"dt_s={self.dt!r},turn_off_step={self.turn_off_step}\n" + ",".join(columns)
        np.savetxt(path, data, delimiter=",", header=header, fmt="%.12g")
