"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ValidationError -> 1,
InfeasibleError -> 2, InternalError -> 3.
"""


class MltiError(Exception):
    """Base class for all package errors."""


class ValidationError(MltiError, ValueError):
    """Bad user input: out-of-range parameter, malformed file, schema violation."""


class InfeasibleError(MltiError):
    """A requested operating point cannot be reached.

    Carries the best value achieved so far (when known) so callers can
    report how far off the target was.
    """

    def __init__(self, message, best_achieved=None):
        super().__init__(message)
        self.best_achieved = best_achieved


class InternalError(MltiError, RuntimeError):
    """An internal invariant was violated; indicates a bug, not bad input."""
