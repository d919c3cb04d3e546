"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input violates an operation's precondition or schema."""


class ConvergenceError(RuntimeError):
    """An iterative scheme stopped before reaching its tolerance.

    Carries the last iterate and residual so callers can inspect how close
    the run got.
    """

    def __init__(self, message, last=None, residual=None):
        super().__init__(message)
        self.last = last
        self.residual = residual


class StitchingError(RuntimeError):
    """Arc stitching could not close a boundary chain unambiguously."""


class FitError(RuntimeError):
    """A least-squares volume fit is unusable (ill-conditioned or
    significantly negative coefficients)."""
