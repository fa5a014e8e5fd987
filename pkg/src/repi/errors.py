"""Exception types raised across the package."""


class ReproError(Exception):
    """Base class for all package errors."""


class GridBudgetError(ReproError, ValueError):
    """A grid would exceed the configured cell budget."""


class DensityError(ReproError, ValueError):
    """Invalid density parameters or non-finite density values."""


class DivergentEntropyError(ReproError, ValueError):
    """The requested Renyi integral diverges for this density."""


class ConstraintError(ReproError, ValueError):
    """Exponents or scalar inputs violate a required constraint."""


class StateError(ReproError, ValueError):
    """Invalid Gaussian quantum state."""


class ConfigError(ReproError, ValueError):
    """Invalid sweep configuration.

    ``path`` names the offending field, e.g. ``"p_grid"``.
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
