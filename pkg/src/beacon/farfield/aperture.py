"""The aperture field: cavity mode plus first-order perturbation scatterers."""

from __future__ import annotations

import logging
import math

import numpy as np
from pydantic import Field, model_validator
from scipy.ndimage import map_coordinates

from ..fdtd import ResonanceResult
from ..geometry import CavityDesign, Hole, lattice_holes
from ..models import ArrayRecord, Spec
from .errors import GeometryMismatchError

__all__ = [
    "Scatterer",
    "ApertureField",
    "sample_field",
    "perturbation_scatterers",
    "compose_aperture",
]

logger = logging.getLogger(__name__)


class Scatterer(Spec):
    """A Gaussian footprint amplitude·exp(-r²/extent²) centred at `position_nm` (x, y)."""

    position_nm: tuple[float, float]
    amplitude: complex
    extent_nm: float = Field(gt=0)
    host: tuple[int, int] | None = None

    @model_validator(mode="after")
    def _finite(self) -> Scatterer:
        if not math.isfinite(abs(self.amplitude)):
            raise ValueError(f"Scatterer amplitude {self.amplitude} is not finite")
        return self


class ApertureField(ArrayRecord):
    """The complex field just above the slab, on the mode's grid."""

    field: np.ndarray
    dx_nm: float = Field(gt=0)
    origin: tuple[int, int]
    wavelength_nm: float = Field(gt=0)
    scatterers: tuple[Scatterer, ...] = ()

    @model_validator(mode="after")
    def _check_field(self) -> ApertureField:
        if self.field.ndim != 2:
            raise ValueError(f"field must be 2D, got shape {self.field.shape}")
        if not np.isfinite(self.field).all():
            raise ValueError("Aperture field holds non-finite values")
        return self

    @classmethod
    def from_mode(cls, mode: ResonanceResult) -> ApertureField:
        return cls(
            field=mode.mode_field.astype(complex),
            dx_nm=mode.dx_nm,
            origin=mode.origin,
            wavelength_nm=mode.lambda_cav_nm,
        )

    @property
    def power(self) -> float:
        return float(np.sum(np.abs(self.field) ** 2))

    def cell_of(self, x_nm: float, y_nm: float) -> tuple[float, float]:
        """Fractional (row, col) of a point given in nm from the cavity centre."""
        return self.origin[0] + y_nm / self.dx_nm, self.origin[1] + x_nm / self.dx_nm

    def add_scatterers(self, scatterers: tuple[Scatterer, ...]) -> ApertureField:
        rows, cols = np.indices(self.field.shape)
        y = (rows - self.origin[0]) * self.dx_nm
        x = (cols - self.origin[1]) * self.dx_nm
        field = self.field.copy()
        for s in scatterers:
            r2 = (x - s.position_nm[0]) ** 2 + (y - s.position_nm[1]) ** 2
            field += s.amplitude * np.exp(-r2 / s.extent_nm**2)
        return self.model_copy(
            update={"field": field, "scatterers": self.scatterers + tuple(scatterers)},
        )


def sample_field(field: np.ndarray, rows, cols) -> np.ndarray:
    """Bilinear interpolation of a complex field at fractional cells."""
    coords = np.vstack([np.atleast_1d(rows), np.atleast_1d(cols)])
    real = map_coordinates(field.real, coords, order=1, mode="nearest")
    imag = map_coordinates(field.imag, coords, order=1, mode="nearest")
    return real + 1j * imag


def _perturbed_holes(mode: ResonanceResult, design: CavityDesign) -> list[Hole]:
    if mode.a_nm is not None and not math.isclose(mode.a_nm, design.lattice.a_nm, rel_tol=1e-9):
        raise GeometryMismatchError(
            f"mode lattice constant {mode.a_nm} nm differs from design {design.lattice.a_nm} nm",
        )
    return [hole for hole in lattice_holes(design) if hole.layer is not None]


def perturbation_scatterers(
    mode: ResonanceResult,
    design: CavityDesign,
    coupling: complex,
    extent_nm: float | None = None,
    constructive: bool = True,
) -> tuple[Scatterer, ...]:
    """One scatterer per annulus, of amplitude coupling·width·|E(host)|.

    The annuli are placed so that their scattered light adds up above the
    cavity centre, so by default every scatterer shares the coupling's phase
    and only the local field magnitude weights it.

    :param extent_nm: Footprint radius; defaults to each host's outer radius.
    :param constructive: If False, each scatterer takes the phase of the local
        mode field instead.
    :raises GeometryMismatchError: if the design's lattice differs from the
        mode's, or a host lies outside the mode grid.
    """
    holes = _perturbed_holes(mode, design)
    if not holes:
        return ()
    rows = np.array([mode.origin[0] + h.y_nm / mode.dx_nm for h in holes])
    cols = np.array([mode.origin[1] + h.x_nm / mode.dx_nm for h in holes])
    ny, nx = mode.shape
    outside = (rows < 0) | (rows > ny - 1) | (cols < 0) | (cols > nx - 1)
    if outside.any():
        hole = holes[int(np.argmax(outside))]
        raise GeometryMismatchError(
            f"host hole {(hole.i, hole.j)} at ({hole.x_nm:.1f}, {hole.y_nm:.1f}) nm "
            f"lies outside the {ny}x{nx} mode grid",
        )
    local = sample_field(mode.mode_field, rows, cols)
    if constructive:
        local = np.abs(local)
    return tuple(
        Scatterer(
            position_nm=(h.x_nm, h.y_nm),
            amplitude=complex(coupling * h.annulus_nm * e),
            extent_nm=extent_nm or h.outer_radius_nm,
            host=(h.i, h.j),
        )
        for h, e in zip(holes, local)
    )


def compose_aperture(
    mode: ResonanceResult,
    design: CavityDesign,
    coupling: complex,
    extent_nm: float | None = None,
    include_mode: bool = True,
    constructive: bool = True,
) -> ApertureField:
    """Build the aperture field of a perturbed cavity.

    Each perturbation annulus adds a Gaussian bump of amplitude
    coupling·width·|E(r_j)| at its host hole. With no perturbation layers the
    aperture equals the mode field exactly.

    :param mode: The cavity mode.
    :param design: The design whose perturbation layers scatter.
    :param coupling: Scattered amplitude per nm of annulus width, relative to
        the local mode field.
    :param extent_nm: Footprint radius of every bump; defaults to the outer
        radius of each host.
    :param include_mode: If False, return the scattered field alone.
    :param constructive: See `perturbation_scatterers`.
    """
    aperture = ApertureField.from_mode(mode)
    if not include_mode:
        aperture = aperture.model_copy(update={"field": np.zeros_like(aperture.field)})
    scatterers = perturbation_scatterers(mode, design, coupling, extent_nm, constructive)
    if scatterers:
        aperture = aperture.add_scatterers(scatterers)
        logger.debug("Added %d scatterers with coupling %s", len(scatterers), coupling)
    return aperture
