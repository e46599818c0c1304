from pydantic import BaseModel
from typing import Any, List, Optional


class SuccessResponse(BaseModel):
    success: bool = True
    data: Any
    message: Optional[str] = None


class ErrorResponse(BaseModel):
    success: bool = False
    error: str
    detail: Optional[str] = None
    exit_code: int = 1


class CheckResult(BaseModel):
    """One row of the verification table"""
    name: str
    measured: float
    tolerance: float
    passed: bool
    detail: Optional[str] = None


class VerifyReport(BaseModel):
    suite: str
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)
