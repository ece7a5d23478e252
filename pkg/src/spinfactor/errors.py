"""Exception types shared across the package."""


class DimensionMismatchError(ValueError):
    """Two objects from spin factors of different dimension were combined."""


class DomainError(ValueError):
    """A scalar function was evaluated outside its domain.

    ``eigenvalue`` holds the offending eigenvalue when one is known.
    """

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class SingularStateError(DomainError):
    """An element that had to be invertible has a (numerically) vanishing eigenvalue."""


class NotAStateError(ValueError):
    """An element is not a trace-one positive element."""


class ResourceError(RuntimeError):
    """A requested computation exceeds a configured size cap."""


class ConvergenceError(RuntimeError):
    """An iterative or limiting procedure failed its residual check."""
