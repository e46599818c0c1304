"""
Helpers shared by the command handlers: building model objects from a
RunConfig and mapping outcomes to exit codes.
"""
import logging
from typing import Any, Dict, Optional, Tuple

from models.bernstein import LevyMeasureSpec, LevyTriplet
from models.calculus import SubordinationPlan
from models.measure import Grading, QuadratureConfig
from models.response import ErrorResponse, SuccessResponse
from models.run_config import RunConfig, SemigroupChoice
from models.semigroup import ExtensionPolicy, SemigroupSpec, StateVector
from models.subordinator import ContourConfig, SubordinatorFamily
from services.bernstein_service import bernstein_service
from services.io_service import io_service
from utils.errors import ConvergenceError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_NUMERICAL = 4


def respond(exit_code: int, body: Any) -> Dict[str, Any]:
    return {'exit_code': exit_code, 'body': body.model_dump()}


def success(data: Any, message: Optional[str] = None) -> Dict[str, Any]:
    return respond(EXIT_OK, SuccessResponse(data=data, message=message))


def error_response(e: Exception) -> Dict[str, Any]:
    """Exit 3 for invalid input, 4 for numerical failures and anything unexpected"""
    if isinstance(e, ConvergenceError):
        logger.error(f"Numerical failure: {str(e)}")
        return respond(EXIT_NUMERICAL, ErrorResponse(error='Numerical failure', detail=str(e), exit_code=EXIT_NUMERICAL))
    if isinstance(e, ValueError):
        logger.error(f"Invalid input: {str(e)}")
        return respond(EXIT_INVALID, ErrorResponse(error='Invalid input', detail=str(e), exit_code=EXIT_INVALID))
    logger.exception(f"Unexpected error: {str(e)}")
    return respond(EXIT_NUMERICAL, ErrorResponse(error='Internal error', detail=str(e), exit_code=EXIT_NUMERICAL))


def build_triplet(config: RunConfig) -> LevyTriplet:
    """--triplet file, or --alpha (plus --killing) for a + l**alpha"""
    if config.triplet is not None:
        return io_service.read_triplet(config.triplet)
    stable = bernstein_service.stable_triplet(config.alpha)
    return LevyTriplet(a=config.killing, b=0.0, measure=stable.measure)


def build_family(config: RunConfig) -> SubordinatorFamily:
    if config.killing > 0:
        return SubordinatorFamily.killed_stable(config.killing, config.alpha)
    return SubordinatorFamily.stable(config.alpha)


def build_plan(config: RunConfig) -> SubordinationPlan:
    overrides = {}
    if config.tail is not None:
        overrides['epsilon_tail'] = config.tail
    if config.atoms is not None:
        overrides['n_atoms'] = config.atoms
    return SubordinationPlan(family=build_family(config), **overrides)


def build_quadrature(config: RunConfig, grading: Grading = Grading.LOGARITHMIC) -> QuadratureConfig:
    overrides = {'grading': grading}
    if config.panels is not None:
        overrides['panels'] = config.panels
    if config.nodes is not None:
        overrides['nodes_per_panel'] = config.nodes
    return QuadratureConfig(**overrides)


def build_contour(config: RunConfig) -> ContourConfig:
    overrides = {}
    if config.theta is not None:
        overrides['theta'] = config.theta
    if config.contour_nodes is not None:
        overrides['nodes'] = config.contour_nodes
    if config.r_factor is not None:
        overrides['r_factor'] = config.r_factor
    return ContourConfig(**overrides)


def load_problem(config: RunConfig) -> Tuple[SemigroupSpec, StateVector]:
    """Semigroup and state named by --semigroup and its input files"""
    if config.semigroup == SemigroupChoice.MATRIX:
        T = SemigroupSpec.from_matrix(io_service.read_matrix(config.matrix))
        return T, io_service.read_vector(config.vector)
    extension = config.extension or ExtensionPolicy.PERIODIC
    x = io_service.read_grid(config.input, extension)
    dimension = 1 if config.semigroup == SemigroupChoice.HEAT1D else 2
    return SemigroupSpec.heat(dimension), x
