"""
Measure-weighted integration.

Vector-valued integrals against a discrete measure are Riemann sums
sum_i w_i * v_i taken in ascending-location order; everything else here
(convolution, Laplace transform, Gauss-Legendre panel rules, refinement
loops) supports building those measures and checking them.
"""
import logging
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from models.measure import DiscreteMeasure, Grading, QuadratureConfig
from models.semigroup import StateVector
from utils.errors import ConvergenceError, DimensionError, DomainError, ShapeError

logger = logging.getLogger(__name__)

# Above this many atoms the running sum carries a compensation term
COMPENSATION_THRESHOLD = 1000


@lru_cache(maxsize=32)
def gauss_legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point rule on [-1, 1]"""
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


class WeightedAccumulator:
    """
    Running sum of weighted arrays. With compensation enabled it keeps a
    Neumaier correction term, so long sums do not drift with atom count.
    """

    def __init__(self, compensated: bool = False):
        self.compensated = compensated
        self._total: Optional[np.ndarray] = None
        self._correction: Optional[np.ndarray] = None

    def add(self, term: np.ndarray) -> None:
        term = np.asarray(term, dtype=float)
        if self._total is None:
            self._total = np.zeros_like(term)
            self._correction = np.zeros_like(term)
        if not self.compensated:
            self._total = self._total + term
            return
        updated = self._total + term
        larger = np.abs(self._total) >= np.abs(term)
        self._correction += np.where(larger, (self._total - updated) + term, (term - updated) + self._total)
        self._total = updated

    def result(self) -> Optional[np.ndarray]:
        if self._total is None:
            return None
        return self._total + self._correction


class QuadratureService:
    """Discrete measures and the integrals taken against them"""

    def integrate_weighted(
        self,
        values: Sequence[StateVector],
        measure: DiscreteMeasure,
        like: Optional[StateVector] = None
    ) -> StateVector:
        """
        Sum_i weight_i * values[i], with values[i] belonging to the i-th atom.

        Args:
            values: one state per atom, all of one shape
            measure: the weights (empty measure gives the zero state)
            like: template for the zero state when both inputs are empty
        """
        if len(values) != len(measure):
            raise DimensionError(f"{len(values)} values for {len(measure)} atoms")
        if not values:
            if like is None:
                raise DimensionError("cannot infer the state shape of an empty integral")
            return like.with_samples(np.zeros_like(like.samples))

        template = values[0]
        for value in values[1:]:
            if value.kind != template.kind or value.samples.shape != template.samples.shape:
                raise ShapeError(
                    f"values mix shapes {template.samples.shape} and {value.samples.shape}"
                )

        # atoms are stored in ascending location order already
        accumulator = WeightedAccumulator(compensated=len(values) > COMPENSATION_THRESHOLD)
        for weight, value in zip(measure.weights, values):
            accumulator.add(weight * value.samples)
        return template.with_samples(accumulator.result())

    def convolve(self, first: DiscreteMeasure, second: DiscreteMeasure, bin_width: float) -> DiscreteMeasure:
        """
        Convolution of two discrete measures, with every pairwise sum snapped to
        the nearest multiple of bin_width. Snapping moves no mass, so the result
        has mass(first) * mass(second).
        """
        if not bin_width > 0:
            raise DomainError(f"bin_width must be positive, got {bin_width}")
        if len(first) == 0 or len(second) == 0:
            return DiscreteMeasure.empty()

        sums = np.add.outer(first.locations, second.locations).ravel()
        products = np.multiply.outer(first.weights, second.weights).ravel()

        bins, inverse = np.unique(np.rint(sums / bin_width), return_inverse=True)
        binned = np.bincount(inverse.ravel(), weights=products)
        locations = bins * bin_width

        # huge bin indices can collide after the multiplication
        locations, inverse = np.unique(locations, return_inverse=True)
        binned = np.bincount(inverse.ravel(), weights=binned)

        logger.debug(f"Convolved {len(first)} x {len(second)} atoms into {locations.size} bins")
        return DiscreteMeasure(locations=locations, weights=binned)

    def laplace_transform(self, measure: DiscreteMeasure, lam: float) -> float:
        """sum_i w_i exp(-lam * s_i); the total mass at lam = 0"""
        if lam < 0:
            raise DomainError(f"Laplace variable must be nonnegative, got {lam}")
        if len(measure) == 0:
            return 0.0
        return float(np.sum(measure.weights * np.exp(-lam * measure.locations)))

    def mass_above(self, measure: DiscreteMeasure, threshold: float) -> float:
        """Mass of the atoms strictly beyond threshold"""
        if len(measure) == 0:
            return 0.0
        return float(np.sum(measure.weights[measure.locations > threshold]))

    def panel_rule(
        self,
        lower: float,
        upper: float,
        panels: int,
        nodes: int,
        grading: Grading = Grading.UNIFORM
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Composite Gauss-Legendre nodes and weights on [lower, upper]"""
        if not upper > lower:
            raise DomainError(f"empty interval [{lower}, {upper}]")
        if grading == Grading.LOGARITHMIC:
            if lower <= 0:
                raise DomainError("logarithmic panels need a positive lower limit")
            edges = np.geomspace(lower, upper, panels + 1)
        else:
            edges = np.linspace(lower, upper, panels + 1)
        return self._map_panels(edges, nodes)

    def origin_graded_rule(self, upper: float, panels: int, nodes: int, smallest: float) -> Tuple[np.ndarray, np.ndarray]:
        """
        Panels on [0, upper]: one on [0, smallest], the rest geometric from
        smallest to upper. Resolves functions that vary fastest near 0.
        """
        if not 0 < smallest < upper:
            raise DomainError(f"need 0 < smallest < upper, got {smallest} and {upper}")
        edges = np.concatenate([[0.0], np.geomspace(smallest, upper, max(panels, 2))])
        return self._map_panels(edges, nodes)

    def _map_panels(self, edges: np.ndarray, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
        reference_nodes, reference_weights = gauss_legendre(nodes)
        midpoints = 0.5 * (edges[1:] + edges[:-1])
        half_widths = 0.5 * (edges[1:] - edges[:-1])
        points = midpoints[:, None] + half_widths[:, None] * reference_nodes[None, :]
        weights = half_widths[:, None] * reference_weights[None, :]
        return points.ravel(), weights.ravel()

    def refine_until_converged(
        self,
        evaluate: Callable[[QuadratureConfig], np.ndarray],
        cfg: QuadratureConfig,
        rtol: float,
        label: str = 'quadrature'
    ) -> np.ndarray:
        """
        Evaluate with cfg, then with doubled panel counts until two successive
        levels agree to rtol (sup norm, relative). Raises ConvergenceError when
        the last allowed level still moves by more than rtol.
        """
        previous = np.asarray(evaluate(cfg), dtype=float)
        change = np.inf
        for level in range(1, cfg.max_refinements + 1):
            current = np.asarray(evaluate(cfg.refined(level)), dtype=float)
            scale = max(float(np.max(np.abs(current), initial=0.0)), float(np.max(np.abs(previous), initial=0.0)))
            change = float(np.max(np.abs(current - previous), initial=0.0))
            if scale > 0:
                change /= scale
            logger.debug(f"{label}: refinement level {level}, relative change {change:.3e}")
            if change <= rtol:
                return current
            previous = current
        raise ConvergenceError(f"{label} did not converge: relative change {change:.3e} exceeds {rtol:.1e}")


# Create a singleton instance for import
quadrature_service = QuadratureService()
