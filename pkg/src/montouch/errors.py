"""Exception types shared across the package."""


class SingularOperatorError(ValueError):
    """Operator failed the condition gate and cannot be inverted."""


class PreconditionError(ValueError):
    """A spectral hypothesis required by a solver does not hold."""


class DegenerateProblemError(ValueError):
    """Problem construction is degenerate, e.g. fewer than two sets."""


class ParseError(ValueError):
    """A problem or operator file is malformed."""


class ConvergenceError(RuntimeError):
    """An iteration hit its cap before reaching the residual target."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = float(residual)
        self.iterations = int(iterations)
