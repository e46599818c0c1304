"""
Bernstein functions in Levy-Khintchine form f(l) = a + b*l + int (1 - exp(-l*t)) mu(dt).
"""
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from models.measure import DiscreteMeasure


class LevyMeasureKind(str, Enum):
    ZERO = 'zero'
    POWER = 'power'  # density c * t**exponent on (0, inf)
    ATOMIC = 'atomic'


class LevyMeasureSpec(BaseModel):
    """Jump measure of a Bernstein function"""
    kind: LevyMeasureKind = LevyMeasureKind.ZERO
    c: Optional[float] = Field(default=None, gt=0)
    exponent: Optional[float] = None
    atoms: Optional[DiscreteMeasure] = None

    class Config:
        frozen = True

    @model_validator(mode='after')
    def _check_variant(self) -> 'LevyMeasureSpec':
        if self.kind == LevyMeasureKind.POWER:
            if self.c is None or self.exponent is None:
                raise ValueError("power density needs both c and exponent")
            # int_0^1 t * t**exponent dt and int_1^inf t**exponent dt must both converge
            if not -2.0 < self.exponent < -1.0:
                raise ValueError(f"power density exponent must lie in (-2, -1), got {self.exponent}")
        elif self.kind == LevyMeasureKind.ATOMIC:
            if self.atoms is None:
                raise ValueError("atomic measure needs atoms")
            if len(self.atoms) and self.atoms.locations[0] <= 0:
                raise ValueError("Levy measure atoms must lie in (0, inf)")
        return self

    @property
    def stability_index(self) -> float:
        """beta with density c * t**(-1-beta); only meaningful for power densities"""
        return -1.0 - self.exponent

    @classmethod
    def zero(cls) -> 'LevyMeasureSpec':
        return cls(kind=LevyMeasureKind.ZERO)

    @classmethod
    def power(cls, c: float, exponent: float) -> 'LevyMeasureSpec':
        return cls(kind=LevyMeasureKind.POWER, c=c, exponent=exponent)

    @classmethod
    def atomic(cls, atoms: DiscreteMeasure) -> 'LevyMeasureSpec':
        return cls(kind=LevyMeasureKind.ATOMIC, atoms=atoms)


class LevyTriplet(BaseModel):
    """(a, b, mu): killing rate, drift, jump measure"""
    a: float = Field(default=0.0, ge=0)
    b: float = Field(default=0.0, ge=0)
    measure: LevyMeasureSpec = Field(default_factory=LevyMeasureSpec.zero)

    class Config:
        frozen = True
