"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: InputError / ConfigError -> 1,
NumericsError / AcceptanceError -> 2, I/O problems (plain OSError) -> 3.
"""


class RkhsSgdError(Exception):
    pass


class InputError(RkhsSgdError, ValueError):
    """Caller passed inconsistent dimensions, indices, or parameters."""


class ConfigError(RkhsSgdError, ValueError):
    """A run configuration violates an invariant (bad radius, bad schedule, ...)."""


class NumericsError(RkhsSgdError, ArithmeticError):
    """A numerical guard tripped: broken Gram, nonpositive means in a slope fit, ..."""


class AcceptanceError(RkhsSgdError):
    """A run finished but failed its configured acceptance check."""
