from ..errors import ConfigError

__all__ = ["ScenarioError", "StageMismatchError"]


class ScenarioError(ConfigError):
    """Raised when a scenario cannot be resolved or its stages do not chain."""

    def __init__(self, scenario: str, reason: str):
        super().__init__(f"Scenario {scenario!r}: {reason}")


class StageMismatchError(ConfigError):
    """Raised when two manifests cannot be compared field by field."""

    def __init__(self, field: str, manifest: str):
        super().__init__(
            f"Manifest {manifest} has no result {field!r}; "
            "both runs must include the stages that produce it.",
        )
