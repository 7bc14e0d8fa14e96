"""Exception hierarchy shared by all modules."""


class ScalingError(Exception):
    """Base class for errors raised by scalegeom."""


class DomainError(ScalingError, ValueError):
    """A field or operation was evaluated outside its domain (e.g. at a singularity)."""


class DimensionError(ScalingError, ValueError):
    """Operands have incompatible dimensions."""


class QuadratureError(ScalingError, ArithmeticError):
    """The quadrature engine met a non-finite integrand or exhausted its subdivision budget."""


class ConvergenceError(ScalingError, RuntimeError):
    """An iterative method failed to reach its tolerance."""
