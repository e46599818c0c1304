"""
Concrete semigroups: exp(-tA) for symmetric matrices through the
eigendecomposition, and the heat semigroup on uniform 1-D/2-D grids.

Heat kernels at least two grid spacings wide are applied by convolution
with the sampled Gauss-Weierstrass kernel. Narrower kernels alias on the
grid, so short times use the lattice heat semigroup exp(t * Laplacian_h)
instead, diagonalized by the FFT (periodic) or the DCT (constant edge).
"""
import logging
import math
from typing import Callable, List

import numpy as np
from scipy import fft as scipy_fft
from scipy import special

from models.semigroup import ExtensionPolicy, SemigroupKind, SemigroupSpec, StateKind, StateVector
from utils.errors import DomainError, ShapeError

logger = logging.getLogger(__name__)

KERNEL_RADIUS = 6.0  # kernel truncated at 6 standard deviations
LATTICE_WIDTH = 2.0  # kernels narrower than 2 grid spacings use the lattice semigroup
FOURIER_RADIUS_FACTOR = 4  # kernels wider than 4 periods use the exact multiplier


class SemigroupService:

    def check_compatible(self, T: SemigroupSpec, x: StateVector) -> None:
        if T.kind == SemigroupKind.MATRIX:
            if x.kind != StateKind.FINITE or x.samples.shape != (T.size,):
                raise ShapeError(f"matrix semigroup of size {T.size} cannot act on a {x.kind.value} state "
                                 f"of shape {x.samples.shape}")
            return
        expected = StateKind.GRID1D if T.dimension == 1 else StateKind.GRID2D
        if x.kind != expected:
            raise ShapeError(f"{T.dimension}-d heat semigroup cannot act on a {x.kind.value} state")

    def _check_time(self, t: float) -> None:
        if not t >= 0 or not math.isfinite(t):
            raise DomainError(f"time must be finite and nonnegative, got {t}")

    def apply(self, T: SemigroupSpec, t: float, x: StateVector) -> StateVector:
        """T_t x; T_0 x is x itself"""
        self._check_time(t)
        self.check_compatible(T, x)
        if t == 0:
            return x
        if T.kind == SemigroupKind.MATRIX:
            return x.with_samples(self._spectral(T, np.exp(-t * T.eigenvalues), x.samples))
        if self._is_lattice_time(t, x.spacing):
            return x.with_samples(self._lattice(x, t, increment=False))
        return x.with_samples(self._convolve(x, t))

    def increment_apply(self, T: SemigroupSpec, t: float, x: StateVector) -> StateVector:
        """x - T_t x, free of cancellation for small t"""
        self._check_time(t)
        self.check_compatible(T, x)
        if t == 0:
            return x.with_samples(np.zeros_like(x.samples))
        if T.kind == SemigroupKind.MATRIX:
            return x.with_samples(self._spectral(T, -np.expm1(-t * T.eigenvalues), x.samples))
        if self._is_lattice_time(t, x.spacing):
            return x.with_samples(self._lattice(x, t, increment=True))
        return x.with_samples(x.samples - self._convolve(x, t))

    def apply_many(self, T: SemigroupSpec, times: np.ndarray, x: StateVector) -> np.ndarray:
        """Stack of T_t x for every t in times, one row per time"""
        times = np.asarray(times, dtype=float)
        if np.any(times < 0) or not np.all(np.isfinite(times)):
            raise DomainError("times must be finite and nonnegative")
        self.check_compatible(T, x)
        if T.kind == SemigroupKind.MATRIX:
            coefficients = T.eigenvectors.T @ x.samples
            return (np.exp(-np.outer(times, T.eigenvalues)) * coefficients[None, :]) @ T.eigenvectors.T
        return np.stack([self.apply(T, t, x).samples for t in times])

    def generator_apply(self, T: SemigroupSpec, x: StateVector) -> StateVector:
        """A x: the matrix itself, or minus the discrete Laplacian"""
        self.check_compatible(T, x)
        if T.kind == SemigroupKind.MATRIX:
            return x.with_samples(np.asarray(T.matrix) @ x.samples)
        return x.with_samples(-self.discrete_laplacian(x))

    def spectral_apply(self, T: SemigroupSpec, g: Callable[[np.ndarray], np.ndarray], x: StateVector) -> StateVector:
        """g(A) x for a matrix semigroup"""
        if T.kind != SemigroupKind.MATRIX:
            raise ShapeError("spectral functions need a matrix semigroup")
        self.check_compatible(T, x)
        return x.with_samples(self._spectral(T, np.asarray(g(T.eigenvalues), dtype=float), x.samples))

    def sup_norm(self, x: StateVector) -> float:
        return float(np.max(np.abs(x.samples), initial=0.0))

    def discrete_laplacian(self, x: StateVector) -> np.ndarray:
        """3-point (1-D) or 5-point (2-D) Laplacian under the state's extension policy"""
        if not x.is_grid:
            raise ShapeError("the discrete Laplacian acts on grid states")
        samples = x.samples
        result = np.zeros_like(samples)
        for axis in range(samples.ndim):
            if x.extension == ExtensionPolicy.PERIODIC:
                before = np.roll(samples, 1, axis=axis)
                after = np.roll(samples, -1, axis=axis)
            else:
                width = [(0, 0)] * samples.ndim
                width[axis] = (1, 1)
                padded = np.pad(samples, width, mode='edge')
                before = np.take(padded, np.arange(0, samples.shape[axis]), axis=axis)
                after = np.take(padded, np.arange(2, samples.shape[axis] + 2), axis=axis)
            result += before - 2.0 * samples + after
        return result / x.spacing ** 2

    def _spectral(self, T: SemigroupSpec, multiplier: np.ndarray, samples: np.ndarray) -> np.ndarray:
        vectors = T.eigenvectors
        return vectors @ (multiplier * (vectors.T @ samples))

    def _is_lattice_time(self, t: float, h: float) -> bool:
        return math.sqrt(2.0 * t) < LATTICE_WIDTH * h

    # Lattice heat semigroup

    def lattice_symbol(self, x: StateVector) -> np.ndarray:
        """
        Eigenvalues of minus the discrete Laplacian in the FFT (periodic) or
        DCT-II (constant edge) basis, laid out like the transformed samples.
        """
        h = x.spacing
        axes: List[np.ndarray] = []
        for n in x.samples.shape:
            if x.extension == ExtensionPolicy.PERIODIC:
                angles = math.pi * np.fft.fftfreq(n)  # pi*k/n
            else:
                angles = 0.5 * math.pi * np.arange(n) / n
            axes.append(4.0 * np.sin(angles) ** 2 / h ** 2)
        if len(axes) == 1:
            return axes[0]
        return np.add.outer(axes[0], axes[1])

    def _lattice(self, x: StateVector, t: float, increment: bool) -> np.ndarray:
        symbol = self.lattice_symbol(x)
        multiplier = -np.expm1(-t * symbol) if increment else np.exp(-t * symbol)
        if x.extension == ExtensionPolicy.PERIODIC:
            return np.real(np.fft.ifftn(np.fft.fftn(x.samples) * multiplier))
        coefficients = scipy_fft.dctn(x.samples, type=2, norm='ortho')
        return scipy_fft.idctn(coefficients * multiplier, type=2, norm='ortho')

    # Sampled Gauss-Weierstrass kernel

    def _convolve(self, x: StateVector, t: float) -> np.ndarray:
        h = x.spacing
        samples = x.samples
        for axis in range(samples.ndim):
            if x.extension == ExtensionPolicy.PERIODIC:
                samples = self._smooth_periodic(samples, axis, t, h)
            else:
                operator = self._edge_operator(samples.shape[axis], h, t)
                moved = np.moveaxis(samples, axis, 0)
                samples = np.moveaxis(np.tensordot(operator, moved, axes=(1, 0)), 0, axis)
        return samples

    def _sampled_kernel(self, radius: int, h: float, t: float) -> np.ndarray:
        offsets = np.arange(-radius, radius + 1)
        kernel = np.exp(-(offsets * h) ** 2 / (4.0 * t))
        return kernel / np.sum(kernel)

    def _smooth_periodic(self, samples: np.ndarray, axis: int, t: float, h: float) -> np.ndarray:
        n = samples.shape[axis]
        radius = int(math.ceil(KERNEL_RADIUS * math.sqrt(2.0 * t) / h))
        if radius <= FOURIER_RADIUS_FACTOR * n:
            # wrap the sampled kernel onto one period
            folded = np.zeros(n)
            np.add.at(folded, np.arange(-radius, radius + 1) % n, self._sampled_kernel(radius, h, t))
            multiplier = np.real(np.fft.rfft(folded))
        else:
            frequencies = 2.0 * math.pi * np.fft.rfftfreq(n, d=h)
            multiplier = np.exp(-t * frequencies ** 2)
        shape = [1] * samples.ndim
        shape[axis] = multiplier.size
        transformed = np.fft.rfft(samples, axis=axis) * multiplier.reshape(shape)
        return np.fft.irfft(transformed, n=n, axis=axis)

    def _edge_operator(self, n: int, h: float, t: float) -> np.ndarray:
        """
        n x n transfer matrix of the truncated kernel with constant extension:
        every kernel tap that lands outside the grid is credited to the
        nearest edge sample, so each row is a probability vector.
        """
        if n == 1:
            return np.ones((1, 1))
        sigma = math.sqrt(2.0 * t)
        radius = int(math.ceil(KERNEL_RADIUS * sigma / h))
        rows = np.arange(n)
        offsets = rows[:, None] - rows[None, :]  # kernel offset k with row - k = column

        if radius <= FOURIER_RADIUS_FACTOR * n:
            kernel = self._sampled_kernel(radius, h, t)
            inside = np.abs(offsets) <= radius
            operator = np.where(inside, kernel[np.clip(offsets + radius, 0, 2 * radius)], 0.0)
            # below[m] = sum of kernel[:m], above[m] = sum of kernel[m:]
            below = np.concatenate([[0.0], np.cumsum(kernel)])
            above = np.concatenate([np.cumsum(kernel[::-1])[::-1], [0.0]])
            # taps with k >= row reach column <= 0, taps with k <= row - (n - 1) reach column >= n - 1
            operator[:, 0] = above[np.clip(rows + radius, 0, 2 * radius + 1)]
            operator[:, n - 1] = below[np.clip(rows - (n - 1) + radius + 1, 0, 2 * radius + 1)]
        else:
            # kernel much wider than the grid: normal cell probabilities
            cdf = special.ndtr((np.arange(-n, n + 1) + 0.5) * h / sigma)
            cells = np.diff(cdf)  # mass of offset k in [-n+1, n]
            operator = np.where(np.abs(offsets) < n, cells[np.clip(offsets + n - 1, 0, 2 * n - 1)], 0.0)
            operator[:, 0] = special.ndtr(-(rows - 0.5) * h / sigma)
            operator[:, n - 1] = special.ndtr((rows - (n - 1) + 0.5) * h / sigma)
            operator /= np.sum(operator, axis=1, keepdims=True)
        return operator

    # Testbeds

    def dirichlet_laplacian(self, d: int) -> np.ndarray:
        """tridiag(-1, 2, -1) of size d"""
        if d < 1:
            raise DomainError(f"size must be positive, got {d}")
        return 2.0 * np.eye(d) - np.eye(d, k=1) - np.eye(d, k=-1)

    def periodic_grid(self, n: int = 512, fn: Callable[[np.ndarray], np.ndarray] = np.cos,
                      period: float = 2.0 * math.pi) -> StateVector:
        """fn sampled at n points of [0, period) with periodic extension"""
        h = period / n
        return StateVector.grid1d(fn(h * np.arange(n)), spacing=h, extension=ExtensionPolicy.PERIODIC, origin=0.0)

    def edge_grid(self, fn: Callable[[np.ndarray], np.ndarray], lower: float = -20.0, upper: float = 20.0,
                  h: float = 0.05) -> StateVector:
        """fn sampled on [lower, upper] with constant extension beyond the edges"""
        n = int(round((upper - lower) / h)) + 1
        return StateVector.grid1d(fn(lower + h * np.arange(n)), spacing=h,
                                  extension=ExtensionPolicy.CONSTANT_EDGE, origin=lower)


# Create a singleton instance for import
semigroup_service = SemigroupService()
