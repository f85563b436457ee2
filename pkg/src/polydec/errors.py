"""Exception hierarchy. The CLI maps ConfigError to exit code 2 and
NumericError to exit code 3."""


class PolydecError(Exception):
    pass


class ConfigError(PolydecError):
    pass


class NumericError(PolydecError):
    pass


class ProjectionError(NumericError):
    """Projection loop hit its hard iteration cap (pathological input)."""
