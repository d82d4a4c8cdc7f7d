"""Design documents: UTF-8 JSON with a unit suffix on every length key."""

from pathlib import Path

from .lattice import CavityDesign, check_design

__all__ = ["dump_design", "load_design"]


def dump_design(design: CavityDesign, path: str | Path) -> None:
    Path(path).write_text(design.model_dump_json(indent=2), encoding="utf-8")


def load_design(path: str | Path) -> CavityDesign:
    """Read a design document and check it for overlapping holes."""
    design = CavityDesign.model_validate_json(Path(path).read_text(encoding="utf-8"))
    check_design(design)
    return design
