import logging
from typing import Any, Dict

from handlers.common import (
    build_contour,
    build_plan,
    build_quadrature,
    build_triplet,
    error_response,
    load_problem,
    success,
)
from models.measure import Grading
from models.run_config import Command, RunConfig
from services.calculus_service import calculus_service
from services.io_service import io_service

logger = logging.getLogger(__name__)


def handler(config: RunConfig) -> Dict[str, Any]:
    """subordinate, f-of-a and resolvent: act on a state read from disk"""
    try:
        T, x = load_problem(config)

        # subordinate --t: S_t x
        if config.command == Command.SUBORDINATE:
            result = calculus_service.subordinate_apply(T, build_plan(config), config.t, x, build_contour(config))

        # f-of-a: f(A) x
        elif config.command == Command.F_OF_A:
            result = calculus_service.f_of_A_apply(T, build_triplet(config), x, build_quadrature(config))

        # resolvent --lambda: (lambda + A)^-1 x, or (lambda + A**alpha)^-1 x with --alpha
        elif config.command == Command.RESOLVENT:
            lam = config.lambdas[0]
            if config.alpha is not None:
                result = calculus_service.subordinated_resolvent_apply(
                    T, build_plan(config), lam, x, build_quadrature(config, Grading.UNIFORM), build_contour(config)
                )
            else:
                result = calculus_service.resolvent_apply(T, lam, x, build_quadrature(config))

        else:
            raise ValueError(f"{config.command.value} is not an operator command")

        io_service.write_state(result, config.output)
        return success({'size': int(result.samples.size)}, message=f"{config.command.value} done")
    except Exception as e:
        return error_response(e)
