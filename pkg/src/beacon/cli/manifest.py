"""Run manifests and the comparison of two runs."""

from __future__ import annotations

import hashlib
import math
from collections.abc import Iterable
from pathlib import Path
from typing import Any

from pydantic import Field

from ..models import Spec
from .errors import StageMismatchError

__all__ = [
    "MANIFEST_NAME",
    "COMPARED_FIELDS",
    "OutputFile",
    "Manifest",
    "Comparison",
    "file_sha256",
    "list_outputs",
    "read_manifest",
    "compare_manifests",
    "format_report",
]

MANIFEST_NAME = "manifest.json"
COMPARED_FIELDS = ("lambda_cav_nm", "q_factor", "eta_lens", "eta_smf")


class OutputFile(Spec):
    path: str = Field(description="Relative to the output directory.")
    sha256: str
    size_bytes: int = Field(ge=0)


class Manifest(Spec):
    scenario: str
    stages: tuple[str, ...]
    config_sha256: str
    seed: int
    threads: int
    versions: dict[str, str]
    wall_time_s: float
    files: tuple[OutputFile, ...]
    results: dict[str, Any] = Field(
        description="Per-stage results and a flat `summary` of the headline figures.",
    )

    def result(self, field: str, label: str = "") -> float:
        """A headline figure from the summary.

        :raises StageMismatchError: if the run did not produce it.
        """
        value = self.results.get("summary", {}).get(field)
        if value is None:
            raise StageMismatchError(field, label or self.scenario)
        return float(value)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")


class Comparison(Spec):
    field: str
    a: float
    b: float
    ratio: float = Field(description="b / a")


def file_sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def list_outputs(directory: Path, exclude: Iterable[str] = (MANIFEST_NAME,)) -> tuple[OutputFile, ...]:
    """Every file under `directory` with its hash, in a stable order."""
    skip = set(exclude)
    return tuple(
        OutputFile(
            path=path.relative_to(directory).as_posix(),
            sha256=file_sha256(path),
            size_bytes=path.stat().st_size,
        )
        for path in sorted(directory.rglob("*"))
        if path.is_file() and path.relative_to(directory).as_posix() not in skip
    )


def read_manifest(path: str | Path) -> Manifest:
    """Read a manifest file, or the manifest inside a run directory."""
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    return Manifest.model_validate_json(path.read_text(encoding="utf-8"))


def compare_manifests(
    a: Manifest,
    b: Manifest,
    fields: Iterable[str] = COMPARED_FIELDS,
) -> list[Comparison]:
    """Ratios b/a of the headline figures of two runs.

    :raises StageMismatchError: if either run lacks one of `fields`.
    """
    rows = []
    for field in fields:
        va, vb = a.result(field, "a"), b.result(field, "b")
        ratio = vb / va if va != 0 else (1.0 if vb == 0 else math.inf)
        rows.append(Comparison(field=field, a=va, b=vb, ratio=ratio))
    return rows


def format_report(rows: list[Comparison]) -> str:
    lines = [f"{'field':<16}{'a':>14}{'b':>14}{'b/a':>10}"]
    lines += [f"{r.field:<16}{r.a:>14.6g}{r.b:>14.6g}{r.ratio:>10.4f}" for r in rows]
    return "\n".join(lines)
