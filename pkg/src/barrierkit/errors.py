"""Exception types raised across the package."""


class DegenerateError(ValueError):
    """Input does not span the ambient space (or has zero measure)."""


class InvalidDataError(ValueError):
    """Measure fails the conditions required by an operation."""


class NotConvergedError(RuntimeError):
    """Iterative solver hit its iteration cap.

    The best iterate found so far is attached as ``solution``.
    """

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class ContainmentError(ValueError):
    """A body that should lie inside another does not."""


class FormatError(ValueError):
    """A file does not match the expected JSON layout."""
