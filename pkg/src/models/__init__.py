from .measure import DiscreteMeasure, Grading, QuadratureConfig
from .bernstein import LevyMeasureKind, LevyMeasureSpec, LevyTriplet
from .subordinator import ContourConfig, FamilyKind, SubordinatorFamily
from .semigroup import ExtensionPolicy, SemigroupKind, SemigroupSpec, StateKind, StateVector
from .calculus import GeneratorReport, PhillipsReport, SubordinationPlan
from .response import CheckResult, ErrorResponse, SuccessResponse, VerifyReport

__all__ = [
    "DiscreteMeasure",
    "Grading",
    "QuadratureConfig",
    "LevyMeasureKind",
    "LevyMeasureSpec",
    "LevyTriplet",
    "ContourConfig",
    "FamilyKind",
    "SubordinatorFamily",
    "ExtensionPolicy",
    "SemigroupKind",
    "SemigroupSpec",
    "StateKind",
    "StateVector",
    "GeneratorReport",
    "PhillipsReport",
    "SubordinationPlan",
    "CheckResult",
    "ErrorResponse",
    "SuccessResponse",
    "VerifyReport",
]
