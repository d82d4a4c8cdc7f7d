"""Parametric description of the perturbed L3 photonic-crystal cavity.

Lattice coordinates follow the convention x = (i + ½·(j mod 2))·a and
y = j·a·√3/2, with the cavity centred on hole (0, 0) of row j = 0.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Mapping
from enum import Enum

import numpy as np
from pydantic import Field, model_validator
from scipy.spatial import cKDTree

from ..models import Spec
from .errors import DuplicateHostError, GeometricOverlapError, UnknownHostHoleError

__all__ = [
    "LayerLabel",
    "LatticeSpec",
    "DefectSpec",
    "PerturbationLayer",
    "CavityDesign",
    "Hole",
    "DEFAULT_ANNULUS_WIDTHS_NM",
    "default_host_holes",
    "lattice_holes",
    "check_design",
    "build_cavity_design",
]

logger = logging.getLogger(__name__)

ROW_PITCH = math.sqrt(3.0) / 2.0


class LayerLabel(str, Enum):
    """Names of the perturbation layers, ordered outward from the cavity."""

    L2 = "L2"
    L3 = "L3"
    L4 = "L4"


DEFAULT_ANNULUS_WIDTHS_NM = {LayerLabel.L2: 5.0, LayerLabel.L3: 10.0, LayerLabel.L4: 20.0}


class LatticeSpec(Spec):
    """Triangular lattice of air holes in a dielectric membrane."""

    a_nm: float = Field(240.0, gt=0, description="Lattice constant.")
    r_norm: float = Field(0.3, gt=0, lt=0.5, description="Hole radius in units of a.")
    slab_thickness_nm: float = Field(165.0, gt=0)
    n_slab: float = Field(3.5, gt=1)
    n_eff: float = Field(
        2.8,
        gt=1,
        description="Effective index of the slab-guided mode used by the 2D reduction.",
    )
    nx: int = Field(17, ge=5, description="Lattice periods along x.")
    ny: int = Field(13, ge=5, description="Lattice rows along y.")

    @model_validator(mode="after")
    def _effective_index_below_slab(self) -> LatticeSpec:
        if self.n_eff > self.n_slab:
            raise ValueError(
                f"n_eff={self.n_eff} exceeds the slab index n_slab={self.n_slab}",
            )
        return self

    @property
    def radius_nm(self) -> float:
        return self.r_norm * self.a_nm


class DefectSpec(Spec):
    """A line defect of missing holes with shifted end holes."""

    removed_holes: int = Field(3, ge=1)
    side_shift_norm: float = Field(0.15, ge=0, lt=0.5)
    reduced_radius_norm: float = Field(0.25, gt=0)

    @model_validator(mode="after")
    def _symmetric_defect(self) -> DefectSpec:
        if self.removed_holes % 2 == 0:
            raise ValueError(
                "removed_holes must be odd so the defect is centred on a lattice site",
            )
        return self

    @property
    def half_length(self) -> int:
        """Largest |i| of the removed holes in the cavity row."""
        return (self.removed_holes - 1) // 2


class PerturbationLayer(Spec):
    """A set of holes each wrapped in a concentric air annulus."""

    label: LayerLabel
    host_holes: tuple[tuple[int, int], ...] = Field(min_length=1)
    annulus_width_nm: float = Field(gt=0)


class Hole(Spec):
    i: int
    j: int
    x_nm: float
    y_nm: float
    radius_nm: float
    annulus_nm: float = 0.0
    layer: LayerLabel | None = None

    @property
    def outer_radius_nm(self) -> float:
        return self.radius_nm + self.annulus_nm


class CavityDesign(Spec):
    lattice: LatticeSpec = LatticeSpec()
    defect: DefectSpec = DefectSpec()
    perturbation_layers: tuple[PerturbationLayer, ...] = ()

    @model_validator(mode="after")
    def _reduced_holes_not_enlarged(self) -> CavityDesign:
        if self.defect.reduced_radius_norm > self.lattice.r_norm:
            raise ValueError(
                f"reduced_radius_norm={self.defect.reduced_radius_norm} exceeds "
                f"r_norm={self.lattice.r_norm}",
            )
        labels = [layer.label for layer in self.perturbation_layers]
        if len(set(labels)) != len(labels):
            raise ValueError(f"Duplicate perturbation layers: {labels}")
        return self

    @property
    def labels(self) -> tuple[LayerLabel, ...]:
        return tuple(layer.label for layer in self.perturbation_layers)

    def holes(self) -> list[Hole]:
        return lattice_holes(self)


def _row_columns(j: int, half_x: int) -> range:
    # Odd rows sit half a period over, so they hold one hole fewer.
    if j % 2:
        return range(-half_x, half_x)
    return range(-half_x, half_x + 1)


def _base_holes(lattice: LatticeSpec, defect: DefectSpec) -> dict[tuple[int, int], Hole]:
    a = lattice.a_nm
    half_x, half_y = lattice.nx // 2, lattice.ny // 2
    m = defect.half_length
    holes = {}
    for j in range(-half_y, half_y + 1):
        y = j * a * ROW_PITCH
        for i in _row_columns(j, half_x):
            if j == 0 and abs(i) <= m:
                continue
            radius = lattice.radius_nm
            if j % 2:
                x = (i + 0.5) * a
            elif j == 0 and abs(i) == m + 1:
                x = math.copysign((abs(i) + defect.side_shift_norm) * a, i)
            else:
                x = i * a
            if abs(j) == 1 and abs(x) <= (m + 0.5) * a * (1 + 1e-12):
                radius = defect.reduced_radius_norm * a
            holes[i, j] = Hole(i=i, j=j, x_nm=x, y_nm=y, radius_nm=radius)
    return holes


def default_host_holes(
    label: LayerLabel | str,
    lattice: LatticeSpec,
    defect: DefectSpec,
) -> tuple[tuple[int, int], ...]:
    """Host holes of a perturbation layer, placed around the cavity.

    L2 wraps the shifted end holes and their diagonal neighbours just outside
    the cavity, where the field is strongest; L3 takes the second rows above
    and below (|x| ≤ 2a) and L4 the third rows (|x| ≤ 2.5a).

    :param label: The layer to place.
    :param lattice: Only used to size the rows (host existence is checked later).
    :param defect: The defect length sets how far out the end holes are.
    """
    label = LayerLabel(label)
    m = defect.half_length
    if label is LayerLabel.L2:
        return (
            (-(m + 1), 0),
            (m + 1, 0),
            (-(m + 2), -1),
            (m + 1, -1),
            (-(m + 2), 1),
            (m + 1, 1),
        )
    if label is LayerLabel.L3:
        return tuple((i, j) for j in (-2, 2) for i in range(-(m + 1), m + 2))
    return tuple((i, j) for j in (-3, 3) for i in range(-(m + 2), m + 2))


def lattice_holes(design: CavityDesign) -> list[Hole]:
    """List every hole of the design, with shifts, reduced radii and annuli applied.

    Perturbations never add or remove holes; they only widen existing ones.

    :raises UnknownHostHoleError: if a layer names a hole that does not exist.
    """
    holes = _base_holes(design.lattice, design.defect)
    for layer in design.perturbation_layers:
        for host in layer.host_holes:
            host = tuple(host)
            if host not in holes:
                raise UnknownHostHoleError(layer.label.value, host)
            if holes[host].layer is not None:
                raise DuplicateHostError(layer.label.value, host, holes[host].layer.value)
            holes[host] = holes[host].model_copy(
                update={"annulus_nm": layer.annulus_width_nm, "layer": layer.label},
            )
    return [holes[key] for key in sorted(holes, key=lambda ij: (ij[1], ij[0]))]


def check_design(design: CavityDesign) -> list[Hole]:
    """Verify that no two holes intersect once shifts and annuli are applied.

    :return: The hole table, so callers need not rebuild it.
    :raises GeometricOverlapError: on the first intersecting pair found.
    """
    holes = lattice_holes(design)
    centres = np.array([(h.x_nm, h.y_nm) for h in holes])
    outer = np.array([h.outer_radius_nm for h in holes])
    pairs = cKDTree(centres).query_pairs(r=2.0 * outer.max(), output_type="ndarray")
    if len(pairs):
        distance = np.hypot(*(centres[pairs[:, 0]] - centres[pairs[:, 1]]).T)
        clash = distance < outer[pairs[:, 0]] + outer[pairs[:, 1]]
        if clash.any():
            first, second = pairs[np.argmax(clash)]
            raise GeometricOverlapError(
                holes[first],
                holes[second],
                float(distance[np.argmax(clash)]),
            )
    return holes


def build_cavity_design(
    lattice: LatticeSpec,
    defect: DefectSpec,
    layers: Iterable[LayerLabel | str] = (),
    annulus_widths_nm: Mapping[str, float] | None = None,
    host_holes: Mapping[str, Iterable[tuple[int, int]]] | None = None,
) -> CavityDesign:
    """Assemble an L3 design with the requested perturbation layers attached.

    :param lattice: The photonic-crystal lattice.
    :param defect: The line defect (removed holes, end-hole shift, reduced radii).
    :param layers: Any subset of {"L2", "L3", "L4"}; the empty set gives the
        unperturbed baseline.
    :param annulus_widths_nm: Optional per-label widths overriding 5/10/20 nm.
    :param host_holes: Optional per-label host lists overriding the defaults.
    :raises GeometricOverlapError: if shifted or widened holes intersect.
    :raises UnknownHostHoleError: if the lattice is too small for a layer.
    """
    widths = {label.value: w for label, w in DEFAULT_ANNULUS_WIDTHS_NM.items()}
    widths.update(annulus_widths_nm or {})
    hosts = dict(host_holes or {})
    labels = sorted({LayerLabel(label) for label in layers}, key=lambda label: label.value)
    perturbation_layers = tuple(
        PerturbationLayer(
            label=label,
            host_holes=tuple(
                tuple(h) for h in hosts.get(label.value, default_host_holes(label, lattice, defect))
            ),
            annulus_width_nm=widths[label.value],
        )
        for label in labels
    )
    design = CavityDesign(lattice=lattice, defect=defect, perturbation_layers=perturbation_layers)
    holes = check_design(design)
    logger.debug(
        "Built design with %d holes and layers %s",
        len(holes),
        [label.value for label in labels],
    )
    return design
