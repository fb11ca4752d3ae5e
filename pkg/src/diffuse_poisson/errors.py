"""Exception types raised by the solver components."""


class ConfigError(ValueError):
    """Invalid problem configuration (grid, dielectric, charges)."""


class SingularEvaluationError(ValueError):
    """A Green's function was evaluated at (or too close to) a charge site."""


class GridMismatchError(ValueError):
    """Two fields or an operator and a field live on different grids."""
