"""
State vectors and concrete semigroups T_t = exp(-tA).
"""
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, PrivateAttr, field_validator, model_validator
from scipy import linalg

MIN_EIGENVALUE = -1e-10
SYMMETRY_TOLERANCE = 1e-12


class ExtensionPolicy(str, Enum):
    CONSTANT_EDGE = 'constant_edge'
    PERIODIC = 'periodic'


class StateKind(str, Enum):
    FINITE = 'finite'
    GRID1D = 'grid1d'
    GRID2D = 'grid2d'


class StateVector(BaseModel):
    """Element x of X: a vector or a function sampled on a uniform grid"""
    kind: StateKind
    samples: np.ndarray
    spacing: Optional[float] = None
    extension: ExtensionPolicy = ExtensionPolicy.CONSTANT_EDGE
    origin: Tuple[float, ...] = ()

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    @field_validator('samples', mode='before')
    @classmethod
    def _as_array(cls, value):
        array = np.array(value, dtype=float)
        array.setflags(write=False)
        return array

    @model_validator(mode='after')
    def _check_shape(self) -> 'StateVector':
        expected_ndim = {StateKind.FINITE: 1, StateKind.GRID1D: 1, StateKind.GRID2D: 2}[self.kind]
        if self.samples.ndim != expected_ndim:
            raise ValueError(f"{self.kind.value} state needs a {expected_ndim}-d array, got {self.samples.ndim}-d")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("state entries must be finite")
        if self.kind != StateKind.FINITE:
            if self.spacing is None or self.spacing <= 0:
                raise ValueError("grid states need a positive spacing")
            if self.origin and len(self.origin) != expected_ndim:
                raise ValueError("origin must have one coordinate per axis")
        return self

    @classmethod
    def finite(cls, entries) -> 'StateVector':
        return cls(kind=StateKind.FINITE, samples=entries)

    @classmethod
    def grid1d(cls, samples, spacing: float, extension: ExtensionPolicy = ExtensionPolicy.CONSTANT_EDGE,
               origin: float = 0.0) -> 'StateVector':
        return cls(kind=StateKind.GRID1D, samples=samples, spacing=spacing, extension=extension, origin=(origin,))

    @classmethod
    def grid2d(cls, samples, spacing: float, extension: ExtensionPolicy = ExtensionPolicy.CONSTANT_EDGE,
               origin: Tuple[float, float] = (0.0, 0.0)) -> 'StateVector':
        return cls(kind=StateKind.GRID2D, samples=samples, spacing=spacing, extension=extension, origin=tuple(origin))

    @property
    def is_grid(self) -> bool:
        return self.kind != StateKind.FINITE

    def with_samples(self, samples: np.ndarray) -> 'StateVector':
        """Same grid metadata, new values"""
        return StateVector(kind=self.kind, samples=samples, spacing=self.spacing,
                           extension=self.extension, origin=self.origin)

    def axis_coordinates(self, axis: int = 0) -> np.ndarray:
        start = self.origin[axis] if self.origin else 0.0
        return start + self.spacing * np.arange(self.samples.shape[axis])


class SemigroupKind(str, Enum):
    MATRIX = 'matrix'
    HEAT = 'heat'


class SemigroupSpec(BaseModel):
    """
    T_t = exp(-tA) for symmetric positive semidefinite A, or the Gauss-Weierstrass
    heat semigroup (A = -Laplacian) in dimension 1 or 2.
    """
    kind: SemigroupKind
    matrix: Optional[np.ndarray] = None
    dimension: Optional[int] = None

    _eigenvalues: Optional[np.ndarray] = PrivateAttr(default=None)
    _eigenvectors: Optional[np.ndarray] = PrivateAttr(default=None)

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    @field_validator('matrix', mode='before')
    @classmethod
    def _as_matrix(cls, value):
        if value is None:
            return None
        matrix = np.array(value, dtype=float)
        matrix.setflags(write=False)
        return matrix

    @model_validator(mode='after')
    def _check_variant(self) -> 'SemigroupSpec':
        if self.kind == SemigroupKind.MATRIX:
            if self.matrix is None:
                raise ValueError("matrix semigroup needs a matrix")
            matrix = np.asarray(self.matrix, dtype=float)
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
                raise ValueError(f"generator must be square, got shape {matrix.shape}")
            scale = max(1.0, float(np.max(np.abs(matrix)))) if matrix.size else 1.0
            if np.max(np.abs(matrix - matrix.T), initial=0.0) > SYMMETRY_TOLERANCE * scale:
                raise ValueError("generator must be symmetric")
        elif self.dimension not in (1, 2):
            raise ValueError(f"heat semigroup dimension must be 1 or 2, got {self.dimension}")
        return self

    def model_post_init(self, __context) -> None:
        if self.kind != SemigroupKind.MATRIX:
            return
        matrix = np.asarray(self.matrix, dtype=float)
        eigenvalues, eigenvectors = linalg.eigh(0.5 * (matrix + matrix.T))
        if eigenvalues.size and eigenvalues[0] < MIN_EIGENVALUE:
            raise ValueError(f"generator must be positive semidefinite, smallest eigenvalue {eigenvalues[0]:.3e}")
        self._eigenvalues = np.clip(eigenvalues, 0.0, None)
        self._eigenvectors = eigenvectors

    @classmethod
    def from_matrix(cls, matrix) -> 'SemigroupSpec':
        return cls(kind=SemigroupKind.MATRIX, matrix=np.array(matrix, dtype=float))

    @classmethod
    def heat(cls, dimension: int = 1) -> 'SemigroupSpec':
        return cls(kind=SemigroupKind.HEAT, dimension=dimension)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self._eigenvectors

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])
