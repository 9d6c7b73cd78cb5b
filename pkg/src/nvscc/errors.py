"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: ConfigError -> 2,
FitNonConvergenceError -> 3, DataFormatError -> 4.
"""


class ConfigError(ValueError):
    """Invalid configuration: unknown key, bad value, missing preset."""


class FitNonConvergenceError(RuntimeError):
    """An iterative fit failed to reach its convergence tolerance."""


class DataFormatError(ValueError):
    """Malformed input data: bad columns, units, or value ranges."""


class UnderdeterminedError(ValueError):
    """Too few data points to constrain the requested parameters."""
