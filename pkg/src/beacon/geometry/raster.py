from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from pydantic import model_validator

from ..models import ArrayRecord
from .errors import ResolutionError
from .lattice import CavityDesign, Hole, check_design

__all__ = ["PermittivityMap", "paint_holes", "rasterize_epsilon", "RESOLUTION_FLOOR"]

logger = logging.getLogger(__name__)

# Coarsest allowed pitch, as a fraction of the lattice constant.
RESOLUTION_FLOOR = 1.0 / 12.0


class PermittivityMap(ArrayRecord):
    """Relative permittivity on a square grid, rows along y and columns along x.

    The cavity centre sits on cell `origin` = (row, column); cell (r, c) is
    centred at x = (c - origin[1])·dx, y = (r - origin[0])·dx.
    """

    epsilon: np.ndarray
    dx_nm: float
    origin: tuple[int, int]
    n_eff: float
    pml_cells: int = 0

    @model_validator(mode="after")
    def _check_shape(self) -> PermittivityMap:
        if self.epsilon.ndim != 2:
            raise ValueError(f"epsilon must be 2D, got shape {self.epsilon.shape}")
        if (self.epsilon < 1.0 - 1e-12).any():
            raise ValueError("epsilon must be >= 1 everywhere")
        return self

    @property
    def shape(self) -> tuple[int, int]:
        return self.epsilon.shape

    @property
    def x_nm(self) -> np.ndarray:
        return (np.arange(self.shape[1]) - self.origin[1]) * self.dx_nm

    @property
    def y_nm(self) -> np.ndarray:
        return (np.arange(self.shape[0]) - self.origin[0]) * self.dx_nm

    def air_fraction(self) -> float:
        """Fraction of the map area that is air (ε = 1), counting partial cells."""
        slab = self.n_eff**2
        return float(np.mean((slab - self.epsilon) / (slab - 1.0)))

    def to_csv(self, path: str | Path) -> None:
        """Write the map row-major with a header giving the pitch and origin."""
        header = (
            f"dx_nm={self.dx_nm!r},origin_row={self.origin[0]},"
            f"origin_col={self.origin[1]},rows={self.shape[0]},cols={self.shape[1]}"
        )
        np.savetxt(path, self.epsilon, delimiter=",", header=header, fmt="%.10g")


def _cell_span(centre: float, radius: float, dx: float, offset: int, size: int) -> slice:
    lo = math.floor((centre - radius) / dx + 0.5) + offset
    hi = math.floor((centre + radius) / dx + 0.5) + offset
    return slice(max(lo, 0), min(hi + 1, size))


def paint_holes(
    holes: Sequence[Hole],
    shape: tuple[int, int],
    dx_nm: float,
    origin: tuple[int, int],
    n_eff: float,
    supersample: int = 8,
) -> np.ndarray:
    """Rasterise air holes (with their annuli) into a permittivity array.

    Each cell is split into `supersample`² sub-cells placed symmetrically about
    its centre; the air fraction of the cell is the share of sub-cell centres
    inside a hole, so a mirrored design gives a mirrored map exactly.
    """
    counts = np.zeros(shape, dtype=np.int64)
    offsets = ((np.arange(supersample) + 0.5) / supersample - 0.5) * dx_nm
    for hole in holes:
        radius = hole.outer_radius_nm
        rows = _cell_span(hole.y_nm, radius, dx_nm, origin[0], shape[0])
        cols = _cell_span(hole.x_nm, radius, dx_nm, origin[1], shape[1])
        if rows.start >= rows.stop or cols.start >= cols.stop:
            continue
        ys = ((np.arange(rows.start, rows.stop) - origin[0]) * dx_nm)[:, None] + offsets
        xs = ((np.arange(cols.start, cols.stop) - origin[1]) * dx_nm)[:, None] + offsets
        dy2 = (ys.reshape(-1) - hole.y_nm) ** 2
        dx2 = (xs.reshape(-1) - hole.x_nm) ** 2
        inside = dy2[:, None] + dx2[None, :] <= radius**2
        n_rows, n_cols = rows.stop - rows.start, cols.stop - cols.start
        counts[rows, cols] += inside.reshape(n_rows, supersample, n_cols, supersample).sum(
            axis=(1, 3),
        )
    air = np.minimum(counts, supersample**2) / supersample**2
    return n_eff**2 - (n_eff**2 - 1.0) * air


def rasterize_epsilon(
    design: CavityDesign,
    dx_nm: float,
    pml_cells: int = 10,
    margin_periods: float = 1.0,
    supersample: int = 8,
) -> PermittivityMap:
    """Discretise a design onto a square grid for the FDTD solver.

    The map has odd dimensions with the cavity centre on the middle cell and
    covers the whole lattice plus `margin_periods` of bare slab and the PML.

    :param design: The cavity design.
    :param dx_nm: Grid pitch; must not exceed a/12.
    :param pml_cells: Absorbing-layer thickness reserved on every side.
    :param margin_periods: Bare-slab padding beyond the outermost holes, in units of a.
    :param supersample: Sub-cells per cell edge used for area weighting.
    :raises ResolutionError: if `dx_nm` is coarser than the resolution floor.
    """
    a = design.lattice.a_nm
    if dx_nm > a * RESOLUTION_FLOOR * (1 + 1e-9):
        raise ResolutionError(dx_nm, a)
    holes = check_design(design)
    reach = margin_periods * a + max(h.outer_radius_nm for h in holes)
    half_x = math.ceil((max(abs(h.x_nm) for h in holes) + reach) / dx_nm) + pml_cells
    half_y = math.ceil((max(abs(h.y_nm) for h in holes) + reach) / dx_nm) + pml_cells
    shape = (2 * half_y + 1, 2 * half_x + 1)
    origin = (half_y, half_x)
    n_eff = design.lattice.n_eff
    epsilon = paint_holes(holes, shape, dx_nm, origin, n_eff, supersample)
    logger.info(
        "Rasterised %d holes onto %dx%d cells at dx=%.2f nm",
        len(holes),
        shape[0],
        shape[1],
        dx_nm,
    )
    return PermittivityMap(
        epsilon=epsilon,
        dx_nm=dx_nm,
        origin=origin,
        n_eff=n_eff,
        pml_cells=pml_cells,
    )
