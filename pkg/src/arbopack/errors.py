"""Exception hierarchy shared by every module."""


class ArbopackError(Exception):
    """Base class for all package errors."""


class InputError(ArbopackError, ValueError):
    """Malformed graph, bounds, subpartition or packing input."""


class CapacityError(ArbopackError):
    """An exhaustive routine was asked to exceed its configured size limit."""

    def __init__(self, message, limit=None):
        super().__init__(message)
        self.limit = limit


class PreconditionError(ArbopackError):
    """An operation was called on an input that violates its precondition.

    ``witness`` carries the offending object when one is available.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InternalConsistencyError(ArbopackError):
    """A state that the underlying theory rules out was reached.

    Always a bug or a silently violated precondition. ``step_log`` holds the
    orientation trace collected so far, for diagnosis.
    """

    def __init__(self, message, step_log=None):
        super().__init__(message)
        self.step_log = list(step_log or [])
