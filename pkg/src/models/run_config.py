"""
Parsed command line, validated before any handler runs.
"""
from enum import Enum
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator
from pydantic_core import PydanticCustomError

from models.semigroup import ExtensionPolicy


class Command(str, Enum):
    BERNSTEIN_EVAL = 'bernstein-eval'
    DENSITY = 'density'
    SUBORDINATE = 'subordinate'
    F_OF_A = 'f-of-a'
    RESOLVENT = 'resolvent'
    VERIFY = 'verify'


class SemigroupChoice(str, Enum):
    MATRIX = 'matrix'
    HEAT1D = 'heat1d'
    HEAT2D = 'heat2d'


class DensityMethod(str, Enum):
    AUTO = 'auto'
    CLOSED_FORM = 'closed-form'
    CONTOUR = 'contour'


class Suite(str, Enum):
    FAST = 'fast'
    FULL = 'full'


class RunConfig(BaseModel):
    command: Command

    # Bernstein function: either a stable index or a triplet file
    alpha: Optional[float] = Field(default=None, gt=0, lt=1)
    triplet: Optional[Path] = None
    killing: float = Field(default=0.0, ge=0)

    # Evaluation points
    lambdas: List[float] = []
    t: Optional[float] = Field(default=None, ge=0)
    s_values: List[float] = []
    s_min: Optional[float] = Field(default=None, gt=0)
    s_max: Optional[float] = Field(default=None, gt=0)
    points: int = Field(default=200, ge=2)
    method: DensityMethod = DensityMethod.AUTO

    # State input
    semigroup: Optional[SemigroupChoice] = None
    input: Optional[Path] = None
    matrix: Optional[Path] = None
    vector: Optional[Path] = None
    extension: Optional[ExtensionPolicy] = None
    output: Optional[Path] = None

    # Numerical overrides
    panels: Optional[int] = Field(default=None, ge=1)
    nodes: Optional[int] = Field(default=None, ge=2)
    theta: Optional[float] = None
    contour_nodes: Optional[int] = Field(default=None, ge=2)
    r_factor: Optional[float] = Field(default=None, gt=0)
    atoms: Optional[int] = Field(default=None, ge=8)
    tail: Optional[float] = Field(default=None, gt=0, lt=1e-2)

    suite: Suite = Suite.FAST

    @model_validator(mode='after')
    def _check_required(self) -> 'RunConfig':
        needs_function = {Command.BERNSTEIN_EVAL, Command.F_OF_A}
        needs_family = {Command.DENSITY, Command.SUBORDINATE}
        needs_state = {Command.SUBORDINATE, Command.F_OF_A, Command.RESOLVENT}

        if self.command in needs_function and self.alpha is None and self.triplet is None:
            raise ValueError(f"{self.command.value} needs --alpha or --triplet")
        if self.command in needs_family and self.alpha is None:
            raise ValueError(f"{self.command.value} needs --alpha")
        if self.command == Command.BERNSTEIN_EVAL and not self.lambdas:
            raise ValueError("bernstein-eval needs at least one --lambda")
        if self.command == Command.SUBORDINATE and self.t is None:
            raise ValueError("subordinate needs --t")
        if self.command == Command.DENSITY and self.t is None:
            raise ValueError("density needs --t")
        if self.command == Command.DENSITY and self.t <= 0:
            raise PydanticCustomError('out_of_range', "density needs a positive --t, got {t}", {'t': self.t})
        if self.command == Command.DENSITY and not self.s_values and (self.s_min is None or self.s_max is None):
            raise ValueError("density needs --s or both --s-min and --s-max")
        if self.command == Command.RESOLVENT and not self.lambdas:
            raise ValueError("resolvent needs --lambda")
        if self.command == Command.RESOLVENT and min(self.lambdas) <= 0:
            raise PydanticCustomError(
                'out_of_range', "resolvent needs a positive --lambda, got {lam}", {'lam': min(self.lambdas)}
            )
        if self.command in needs_state:
            if self.semigroup is None:
                raise ValueError(f"{self.command.value} needs --semigroup")
            if self.semigroup == SemigroupChoice.MATRIX and (self.matrix is None or self.vector is None):
                raise ValueError("matrix semigroups need --matrix and --vector")
            if self.semigroup != SemigroupChoice.MATRIX and self.input is None:
                raise ValueError("heat semigroups need --input")
        return self
