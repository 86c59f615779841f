"""Exception hierarchy shared across the package."""


class ConfigError(ValueError):
    """Invalid scenario, weight, domain or graph configuration."""


class SolverError(RuntimeError):
    """Numerical failure inside the iterative planner."""


class RiccatiDivergenceError(SolverError):
    """Backward Riccati sweep exceeded the configured norm bound."""


class ProjectionDivergenceError(SolverError):
    """Closed-loop tracking integration left the configured state bound."""
