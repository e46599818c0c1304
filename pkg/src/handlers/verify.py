import logging
from typing import Any, Dict

from handlers.common import EXIT_CHECK_FAILED, EXIT_OK, error_response, respond
from models.response import SuccessResponse
from models.run_config import RunConfig
from services.verification_service import verification_service

logger = logging.getLogger(__name__)


def handler(config: RunConfig) -> Dict[str, Any]:
    """verify: run the acceptance suite and print the PASS/FAIL table"""
    try:
        report = verification_service.run(config.suite)
        print(verification_service.format_table(report))
        if config.output is not None:
            with open(config.output, 'w') as handle:
                handle.write(report.model_dump_json(indent=2))
        exit_code = EXIT_OK if report.passed else EXIT_CHECK_FAILED
        response = SuccessResponse(
            success=report.passed,
            data=report.model_dump(),
            message=f"{sum(check.passed for check in report.checks)}/{len(report.checks)} checks passed"
        )
        return respond(exit_code, response)
    except Exception as e:
        return error_response(e)
