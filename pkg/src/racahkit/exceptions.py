"""Exception types raised by racahkit."""


class RacahkitError(Exception):
    """Base class for all library errors."""


class DimensionError(RacahkitError, ValueError):
    """Operands have incompatible shapes."""


class ParameterError(RacahkitError, ValueError):
    """A parameter set violates a named invariant.

    The offending invariant is kept in ``invariant`` so callers (the CLI in
    particular) can report it without parsing the message.
    """

    def __init__(self, invariant, message=None):
        self.invariant = invariant
        super().__init__(message or invariant)


class ConvergenceError(RacahkitError, RuntimeError):
    """An iterative solver hit its iteration cap."""
