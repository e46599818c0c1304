"""
Convolution semigroups of sub-probability measures with a known density.
"""
import math
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from models.measure import DiscreteMeasure


class FamilyKind(str, Enum):
    DRIFT_KILLING = 'drift_killing'
    STABLE = 'stable'
    KILLED_STABLE = 'killed_stable'


class SubordinatorFamily(BaseModel):
    """t -> mu_t for f(l) = a + b*l, l**alpha or a + l**alpha"""
    kind: FamilyKind
    a: float = Field(default=0.0, ge=0)
    b: float = Field(default=0.0, ge=0)
    alpha: Optional[float] = None

    class Config:
        frozen = True

    @model_validator(mode='after')
    def _check_parameters(self) -> 'SubordinatorFamily':
        if self.kind == FamilyKind.DRIFT_KILLING:
            if self.alpha is not None:
                raise ValueError("drift_killing family takes no alpha")
        else:
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ValueError(f"stable index must lie in (0, 1), got {self.alpha}")
            if self.kind == FamilyKind.STABLE and self.a != 0.0:
                raise ValueError("use killed_stable for a killing rate")
            if self.b != 0.0:
                raise ValueError("stable families carry no drift")
        return self

    @classmethod
    def drift_killing(cls, a: float = 0.0, b: float = 0.0) -> 'SubordinatorFamily':
        return cls(kind=FamilyKind.DRIFT_KILLING, a=a, b=b)

    @classmethod
    def stable(cls, alpha: float) -> 'SubordinatorFamily':
        return cls(kind=FamilyKind.STABLE, alpha=alpha)

    @classmethod
    def killed_stable(cls, a: float, alpha: float) -> 'SubordinatorFamily':
        return cls(kind=FamilyKind.KILLED_STABLE, a=a, alpha=alpha)

    @property
    def killing_rate(self) -> float:
        """f(0+) of the associated Bernstein function"""
        return 0.0 if self.kind == FamilyKind.STABLE else self.a

    @property
    def has_density(self) -> bool:
        return self.kind != FamilyKind.DRIFT_KILLING


class ContourConfig(BaseModel):
    """Rays w = r * exp(+-i*theta) for the inverse Laplace integral of exp(-t*w**alpha)"""
    theta: float = 3.0 * math.pi / 4.0
    r_factor: float = Field(default=1.0, gt=0)
    panels: int = Field(default=64, ge=1)
    nodes: int = Field(default=16, ge=2)  # Gauss-Legendre nodes per panel

    class Config:
        frozen = True

    @model_validator(mode='after')
    def _check_angle(self) -> 'ContourConfig':
        # cos(theta) < 0 is what makes exp(s*w) decay along the rays
        if not math.pi / 2.0 < self.theta < math.pi:
            raise ValueError(f"contour angle must lie strictly between pi/2 and pi, got {self.theta}")
        return self


class DiscretizedSubordinator(BaseModel):
    """A discretized mu_t together with the cutoffs that produced it"""
    measure: DiscreteMeasure
    s_min: float
    s_max: float
    exact_mass: float
