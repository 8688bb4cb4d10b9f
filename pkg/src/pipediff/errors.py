"""Exception types shared across the simulator."""


class PipeClimbError(Exception):
    """Base class for scenario and simulation failures."""


class InfeasibleConstraintError(PipeClimbError):
    """Imposed output speeds conflict with the differential's sum relation."""


class InvalidGeometryError(PipeClimbError):
    """Geometric precondition violated (e.g. contact radius >= bend radius)."""


class NoFitError(PipeClimbError):
    """The robot cannot pass: required compression or tilt exceeds its limits."""


class InvalidScenarioError(PipeClimbError):
    """Scenario-level contradiction (e.g. network shorter than the robot)."""


class ScenarioParseError(PipeClimbError):
    """Scenario text failed validation; carries per-line diagnostics."""

    def __init__(self, issues):
        self.issues = tuple(issues)
        detail = "; ".join(f"line {line}: {message}" for line, message in self.issues)
        super().__init__(detail or "invalid scenario")
