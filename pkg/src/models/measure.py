"""
Discrete measures on [0, inf) and quadrature settings.
"""
from enum import Enum
from typing import Iterable, List, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from utils.settings import settings

SUB_PROBABILITY_SLACK = 1e-9


class Grading(str, Enum):
    UNIFORM = 'uniform'
    LOGARITHMIC = 'logarithmic'


class QuadratureConfig(BaseModel):
    """Composite Gauss-Legendre settings"""
    panels: int = Field(default_factory=lambda: settings.default_panels, ge=1)
    nodes_per_panel: int = Field(default_factory=lambda: settings.default_nodes, ge=2)
    grading: Grading = Grading.LOGARITHMIC
    max_refinements: int = Field(default=3, ge=1)  # panel doublings before giving up

    class Config:
        frozen = True

    def refined(self, level: int) -> 'QuadratureConfig':
        """Same rule with 2**level times as many panels"""
        return self.model_copy(update={'panels': self.panels * 2 ** level})


class DiscreteMeasure(BaseModel):
    """Finitely supported nonnegative measure, atoms sorted by location"""
    locations: np.ndarray
    weights: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    @field_validator('locations', 'weights', mode='before')
    @classmethod
    def _as_array(cls, value):
        array = np.array(value, dtype=float).reshape(-1)
        array.setflags(write=False)
        return array

    @model_validator(mode='after')
    def _check_atoms(self) -> 'DiscreteMeasure':
        if self.locations.shape != self.weights.shape:
            raise ValueError(
                f"locations ({self.locations.size}) and weights ({self.weights.size}) differ in length"
            )
        if not (np.all(np.isfinite(self.locations)) and np.all(np.isfinite(self.weights))):
            raise ValueError("atoms must be finite")
        if np.any(self.locations < 0):
            raise ValueError("locations must be nonnegative")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")
        if np.any(np.diff(self.locations) <= 0):
            raise ValueError("locations must be strictly increasing")
        return self

    @classmethod
    def from_atoms(cls, atoms: Iterable[Tuple[float, float]]) -> 'DiscreteMeasure':
        atoms = list(atoms)
        if not atoms:
            return cls.empty()
        locations, weights = zip(*atoms)
        return cls(locations=locations, weights=weights)

    @classmethod
    def dirac(cls, location: float, weight: float = 1.0) -> 'DiscreteMeasure':
        return cls(locations=[location], weights=[weight])

    @classmethod
    def empty(cls) -> 'DiscreteMeasure':
        return cls(locations=[], weights=[])

    @property
    def atoms(self) -> List[Tuple[float, float]]:
        return list(zip(self.locations.tolist(), self.weights.tolist()))

    @property
    def mass(self) -> float:
        return float(np.sum(self.weights)) if self.weights.size else 0.0

    def is_sub_probability(self) -> bool:
        return self.mass <= 1.0 + SUB_PROBABILITY_SLACK

    def scaled(self, factor: float) -> 'DiscreteMeasure':
        return DiscreteMeasure(locations=self.locations, weights=self.weights * factor)

    def __len__(self) -> int:
        return int(self.locations.size)
