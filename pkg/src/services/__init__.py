from .quadrature_service import QuadratureService, quadrature_service
from .bernstein_service import BernsteinService, bernstein_service
from .subordinator_service import SubordinatorService, subordinator_service
from .semigroup_service import SemigroupService, semigroup_service
from .calculus_service import CalculusService, calculus_service
from .io_service import IOService, io_service
from .verification_service import VerificationService, verification_service

__all__ = [
    "QuadratureService",
    "BernsteinService",
    "SubordinatorService",
    "SemigroupService",
    "CalculusService",
    "IOService",
    "VerificationService",
    "quadrature_service",
    "bernstein_service",
    "subordinator_service",
    "semigroup_service",
    "calculus_service",
    "io_service",
    "verification_service",
]
