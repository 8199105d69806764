"""Exception types shared across the simulator.

Plain argument problems raise :class:`ValueError`; the subclasses below
exist so the CLI can map failures to distinct exit codes.
"""


class ChirasimError(Exception):
    """Base class for simulator-specific failures."""


class ConfigError(ChirasimError, ValueError):
    """A scenario configuration is malformed or out of range."""


class DegenerateError(ChirasimError, ArithmeticError):
    """Error propagation or linearization divides by (nearly) zero."""


class UndefinedEEError(ChirasimError, ValueError):
    """Enantiomeric excess requested for a sample with no solute."""


class OutOfRangeError(ChirasimError, ValueError):
    """A threshold crossing does not occur inside the swept range."""


class ValidationFailure(ChirasimError):
    """One or more oracle checks failed."""
