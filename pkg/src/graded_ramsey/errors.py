"""Exception types shared across modules."""


class GradedRamseyError(Exception):
    """Base class for all library errors."""


class BudgetExceeded(GradedRamseyError):
    """A configured size or work budget would be exceeded."""


class NotGraded(GradedRamseyError):
    """The digraph admits no graded partition.

    ``witness`` is either an edge ``(u, v)`` that spans more than one layer or a
    directed cycle given as a vertex list.
    """

    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class SizeMismatch(GradedRamseyError, ValueError):
    pass


class InvalidRequest(GradedRamseyError, ValueError):
    pass


class MedianPropertyViolation(GradedRamseyError):
    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class DisconnectedReduction(GradedRamseyError):
    """The digraph is disconnected; run each component separately."""

    def __init__(self, message, components):
        super().__init__(message)
        self.components = components
