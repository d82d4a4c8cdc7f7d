"""The `beacon` command: run scenarios, compare runs, validate configs.

Exit status is 0 on success, 1 for an invalid config, 2 for a numerical
failure and 3 for an I/O error.
"""

from __future__ import annotations

import argparse
import logging
import shutil
import sys
import time
from collections.abc import Sequence
from pathlib import Path

from pydantic import ValidationError

from ..diagnose import versions
from ..errors import ConfigError, NumericalError
from .manifest import MANIFEST_NAME, Manifest, compare_manifests, format_report, list_outputs, read_manifest
from .scenario import Scenario, load_scenario
from .stages import run_pipeline

__all__ = ["main", "build_parser", "run_scenario", "EXIT_CONFIG", "EXIT_NUMERICAL", "EXIT_IO"]

logger = logging.getLogger(__name__)

EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


def run_scenario(scenario: Scenario) -> Manifest:
    """Run every stage and move the outputs into `scenario.out_dir` with their manifest.

    Outputs are written to a hidden sibling directory first and only replace
    `out_dir` once every stage has succeeded; a failed run leaves nothing behind.
    """
    out_dir = scenario.out_dir
    staging = out_dir.parent / f".{out_dir.name}.partial"
    if staging.exists():
        shutil.rmtree(staging)
    staging.mkdir(parents=True)
    start = time.perf_counter()
    try:
        run = run_pipeline(scenario, staging)
        manifest = Manifest(
            scenario=scenario.name,
            stages=scenario.stages,
            config_sha256=scenario.config_sha256,
            seed=scenario.seed,
            threads=scenario.threads,
            versions=versions(),
            wall_time_s=time.perf_counter() - start,
            files=list_outputs(staging),
            results=run.results,
        )
        manifest.write(staging / MANIFEST_NAME)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    if out_dir.exists():
        shutil.rmtree(out_dir)
    staging.rename(out_dir)
    logger.info("Wrote %d files to %s in %.1f s", len(manifest.files), out_dir, manifest.wall_time_s)
    return manifest


def _run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario, out_dir=args.out_dir, seed=args.seed, threads=args.threads)
    manifest = run_scenario(scenario)
    summary = manifest.results.get("summary", {})
    for key, value in summary.items():
        print(f"{key} = {value:.6g}" if isinstance(value, float) else f"{key} = {value}")
    print(f"Outputs in {scenario.out_dir}")
    return 0


def _compare(args: argparse.Namespace) -> int:
    rows = compare_manifests(read_manifest(args.manifest_a), read_manifest(args.manifest_b))
    print(format_report(rows))
    return 0


def _validate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    print(f"{scenario.config_path}: valid ({', '.join(scenario.stages)})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beacon",
        description="Simulate a perturbed L3 cavity single-photon source from design to g2.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    verbs = parser.add_subparsers(dest="verb", required=True)

    run = verbs.add_parser("run", help="Run a scenario and write its outputs and manifest.")
    run.add_argument("scenario", help="Scenario name under the config root (e.g. figures/fig4a) or a path")
    run.add_argument("--seed", type=int, default=None, help="Override the config's seed")
    run.add_argument("--threads", type=int, default=1, help="Worker cap; results do not depend on it")
    run.add_argument("--out-dir", type=Path, default=None, help="Default: results/<scenario>")
    run.set_defaults(handler=_run)

    compare = verbs.add_parser("compare", help="Tabulate b/a ratios of two runs' headline figures.")
    compare.add_argument("manifest_a", type=Path)
    compare.add_argument("manifest_b", type=Path)
    compare.set_defaults(handler=_compare)

    validate = verbs.add_parser("validate-config", help="Check a scenario config without running it.")
    validate.add_argument("scenario")
    validate.set_defaults(handler=_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", 1) < 1:
        print("[error] --threads must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.handler(args)
    except (ConfigError, ValidationError, ValueError) as exc:
        print(f"[config error] {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"[numerical error] {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"[io error] {exc}", file=sys.stderr)
        return EXIT_IO
