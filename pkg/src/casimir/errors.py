"""Exception hierarchy shared by all engines."""


class CasimirError(Exception):
    """Base class for every error raised by the package."""


class DomainError(CasimirError, ValueError):
    """Argument outside the domain of a function."""


class ValidationError(CasimirError, ValueError):
    """A domain type invariant is violated."""


class ConvergenceError(CasimirError, ArithmeticError):
    """A series or quadrature could not reach the requested tolerance within budget."""


class ExtrapolationError(ConvergenceError):
    """The damping-parameter extrapolation is unstable."""


class DegeneratePathError(CasimirError, ValueError):
    """An image path has (numerically) zero length."""


class CutoffError(CasimirError, ValueError):
    """Short-distance cutoff is too large for the geometry."""


class KernelDecayError(CasimirError, ValueError):
    """A test kernel does not provide a certifiable truncation tail."""
