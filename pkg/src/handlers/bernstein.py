import logging
from typing import Any, Dict

import pandas as pd

from handlers.common import build_quadrature, build_triplet, error_response, success
from models.run_config import RunConfig
from services.bernstein_service import bernstein_service
from services.io_service import io_service

logger = logging.getLogger(__name__)


def handler(config: RunConfig) -> Dict[str, Any]:
    """bernstein-eval: tabulate f(lambda) as CSV lambda,f_lambda"""
    try:
        f = build_triplet(config)
        cfg = build_quadrature(config)
        values = bernstein_service.eval_many(f, config.lambdas, cfg)
        io_service.write_frame(pd.DataFrame({'lambda': config.lambdas, 'f_lambda': values}), config.output)
        return success({'rows': len(config.lambdas)}, message=f"Evaluated f at {len(config.lambdas)} points")
    except Exception as e:
        return error_response(e)
