"""
Exception hierarchy. Validation-type errors also derive from ValueError so
callers that only know about ValueError keep working.
"""


class SubfnError(Exception):
    """Base class for all library errors"""


class DomainError(SubfnError, ValueError):
    """Argument outside the mathematical domain of an operation"""


class ShapeError(SubfnError, ValueError):
    """State vectors of incompatible shape or kind"""


class DimensionError(SubfnError, ValueError):
    """Length mismatch between values and measure atoms"""


class ParseError(SubfnError, ValueError):
    """Input file could not be read or failed validation"""


class ConvergenceError(SubfnError):
    """Quadrature refinement did not settle within tolerance"""


class QuadratureFailureError(ConvergenceError):
    """Contour quadrature produced a clearly negative density"""


class DiscretizationError(ConvergenceError):
    """Discretized measure mass left its admissible bracket"""
