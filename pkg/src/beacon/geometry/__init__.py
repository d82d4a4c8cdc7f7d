from .errors import (
    DuplicateHostError,
    GeometricOverlapError,
    ResolutionError,
    UnknownHostHoleError,
)
from .io import dump_design, load_design
from .lattice import (
    DEFAULT_ANNULUS_WIDTHS_NM,
    CavityDesign,
    DefectSpec,
    Hole,
    LatticeSpec,
    LayerLabel,
    PerturbationLayer,
    build_cavity_design,
    check_design,
    default_host_holes,
    lattice_holes,
)
from .raster import RESOLUTION_FLOOR, PermittivityMap, paint_holes, rasterize_epsilon

__all__ = [
    "LayerLabel",
    "LatticeSpec",
    "DefectSpec",
    "PerturbationLayer",
    "CavityDesign",
    "Hole",
    "DEFAULT_ANNULUS_WIDTHS_NM",
    "build_cavity_design",
    "check_design",
    "default_host_holes",
    "lattice_holes",
    "PermittivityMap",
    "RESOLUTION_FLOOR",
    "paint_holes",
    "rasterize_epsilon",
    "dump_design",
    "load_design",
    "GeometricOverlapError",
    "UnknownHostHoleError",
    "ResolutionError",
    "DuplicateHostError",
]
