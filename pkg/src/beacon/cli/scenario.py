from __future__ import annotations

import hashlib
import logging
from pathlib import Path

from pydantic import Field

from ..models import Spec
from .config import PIPELINE, ScenarioConfig, StageName, config_root
from .errors import ScenarioError

__all__ = ["Scenario", "check_stages", "resolve_config", "load_scenario"]

logger = logging.getLogger(__name__)


class Scenario(Spec):
    """A resolved scenario: where its config came from, what runs, where it writes."""

    name: str
    stages: tuple[StageName, ...]
    config: ScenarioConfig
    config_path: Path
    config_sha256: str
    out_dir: Path
    seed: int = Field(ge=0)
    threads: int = Field(1, ge=1)


def check_stages(name: str, config: ScenarioConfig) -> None:
    """Check the stage list is a contiguous run of the pipeline with its sections present.

    A run may start at any stage. A stage without its config section is an
    error, as is far-field collection without the FDTD mode it needs.

    :raises ScenarioError: on the first problem found.
    """
    stages = config.stages
    if len(set(stages)) != len(stages):
        raise ScenarioError(name, f"stages repeat: {list(stages)}")
    first = PIPELINE.index(stages[0])
    expected = PIPELINE[first : first + len(stages)]
    if tuple(stages) != expected:
        raise ScenarioError(
            name,
            f"stages {list(stages)} are not a contiguous run of {list(PIPELINE)}",
        )
    for stage in stages:
        if getattr(config, stage) is None:
            raise ScenarioError(name, f"stage {stage!r} has no config section")
    if "fdtd" in stages and config.geometry is None:
        raise ScenarioError(name, "the fdtd stage needs a geometry section")
    if stages[0] == "farfield":
        raise ScenarioError(name, "the farfield stage needs the fdtd stage before it")


def resolve_config(name: str, root: Path | None = None) -> Path:
    """Find the JSON file of a scenario.

    An existing file path is taken as it is; otherwise `name` is looked up as
    `<root>/<name>.json`.

    :raises FileNotFoundError: if neither exists.
    """
    direct = Path(name)
    if direct.is_file():
        return direct
    path = (root or config_root()) / f"{name}.json"
    if not path.is_file():
        raise FileNotFoundError(f"No scenario {name!r} (looked for {path})")
    return path


def load_scenario(
    name: str,
    out_dir: Path | None = None,
    seed: int | None = None,
    threads: int = 1,
    root: Path | None = None,
) -> Scenario:
    """Read, validate and resolve a scenario.

    :param name: Scenario name under the config root, e.g. "figures/fig4a", or a path.
    :param out_dir: Defaults to `results/<name>`.
    :param seed: Overrides the seed in the config.
    :param threads: Worker cap for parallel stages; never changes the results.
    :raises pydantic.ValidationError: if the config does not match the schema.
    :raises ScenarioError: if the stages do not chain.
    """
    path = resolve_config(name, root)
    raw = path.read_bytes()
    config = ScenarioConfig.model_validate_json(raw)
    check_stages(name, config)
    default_out = Path("results") / (path.stem if path == Path(name) else name)
    scenario = Scenario(
        name=name,
        stages=config.stages,
        config=config,
        config_path=path,
        config_sha256=hashlib.sha256(raw).hexdigest(),
        out_dir=out_dir if out_dir is not None else default_out,
        seed=config.seed if seed is None else seed,
        threads=threads,
    )
    logger.debug("Loaded scenario %s from %s: stages %s", name, path, list(config.stages))
    return scenario
