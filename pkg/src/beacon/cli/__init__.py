from .config import PIPELINE, ScenarioConfig, config_root
from .errors import ScenarioError, StageMismatchError
from .main import EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL, build_parser, main, run_scenario
from .manifest import Comparison, Manifest, compare_manifests, read_manifest
from .scenario import Scenario, check_stages, load_scenario
from .stages import PipelineRun, design_name, run_pipeline

__all__ = [
    "main",
    "build_parser",
    "run_scenario",
    "EXIT_CONFIG",
    "EXIT_NUMERICAL",
    "EXIT_IO",
    "PIPELINE",
    "ScenarioConfig",
    "config_root",
    "Scenario",
    "check_stages",
    "load_scenario",
    "PipelineRun",
    "design_name",
    "run_pipeline",
    "Manifest",
    "Comparison",
    "compare_manifests",
    "read_manifest",
    "ScenarioError",
    "StageMismatchError",
]
