import logging
from typing import Any, Dict

import numpy as np
import pandas as pd

from handlers.common import build_contour, build_family, error_response, success
from models.run_config import DensityMethod, RunConfig
from services.io_service import io_service
from services.subordinator_service import subordinator_service

logger = logging.getLogger(__name__)


def handler(config: RunConfig) -> Dict[str, Any]:
    """density: tabulate g_t(s) as CSV s,g"""
    try:
        family = build_family(config)
        if config.s_values:
            s = np.array(config.s_values, dtype=float)
        else:
            s = np.geomspace(config.s_min, config.s_max, config.points)

        closed_form = {
            DensityMethod.AUTO: None,
            DensityMethod.CLOSED_FORM: True,
            DensityMethod.CONTOUR: False,
        }[config.method]
        values = subordinator_service.density(family, config.t, s, build_contour(config), closed_form=closed_form)

        io_service.write_frame(pd.DataFrame({'s': s, 'g': values}), config.output)
        return success({'rows': int(s.size)}, message=f"Tabulated the density at {s.size} points")
    except Exception as e:
        return error_response(e)
