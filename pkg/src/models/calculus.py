"""
Inputs and reports of the subordination calculus.
"""
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from models.subordinator import SubordinatorFamily
from utils.settings import settings


class SubordinationPlan(BaseModel):
    """How mu_t is discretized before integrating T_s x against it"""
    family: SubordinatorFamily
    epsilon_tail: float = Field(default_factory=lambda: settings.default_tail, gt=0, lt=1e-2)
    n_atoms: int = Field(default_factory=lambda: settings.default_atoms, ge=8)

    class Config:
        frozen = True


class GeneratorReport(BaseModel):
    """Convergence of (x - S_h x)/h towards a reference vector"""
    h_values: List[float]
    errors: List[float]
    estimated_order: float
    extrapolated_error: Optional[float] = None

    @model_validator(mode='after')
    def _check_lengths(self) -> 'GeneratorReport':
        if len(self.h_values) != len(self.errors):
            raise ValueError("h_values and errors differ in length")
        if any(later >= earlier for earlier, later in zip(self.h_values, self.h_values[1:])):
            raise ValueError("h_values must be strictly decreasing")
        return self


class PhillipsReport(BaseModel):
    """Distance between the extrapolated generator of S and f(A)x"""
    lhs_rhs_error: float
    order: float
    two_step_error: float  # Richardson on the two smallest steps only
    h_values: List[float]
    quotient_errors: List[float]
