"""Exception hierarchy shared across the package."""


class ValidationError(ValueError):
    """A physical parameter or state violates a documented invariant."""


class NumericalError(RuntimeError):
    """A solver failed to converge or a discretization check failed."""


class ConfigError(ValueError):
    """A run configuration could not be parsed or contains unknown keys."""
