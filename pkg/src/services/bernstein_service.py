"""
Evaluation and sanity checks of Bernstein functions given by a Levy triplet.
"""
import logging
import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from models.bernstein import LevyMeasureKind, LevyMeasureSpec, LevyTriplet
from models.measure import Grading, QuadratureConfig
from services.quadrature_service import QuadratureService, quadrature_service
from utils.errors import DomainError

logger = logging.getLogger(__name__)

HEAD_TOLERANCE = 1e-9  # jump mass dropped below t_min
TAIL_TOLERANCE = 1e-9  # jump mass dropped above t_max
EVAL_RTOL = 1e-6
MAX_SIGN_ORDER = 4
SIGN_TOLERANCE = 1e-8
VALUE_RTOL = 1e-12  # assumed accuracy of each f(lambda) in the sign check


class BernsteinService:
    def __init__(self, quadrature: Optional[QuadratureService] = None):
        self.quadrature = quadrature or quadrature_service

    def stable_triplet(self, alpha: float) -> LevyTriplet:
        """Triplet of f(l) = l**alpha: no killing, no drift, c = -1/Gamma(-alpha)"""
        if not 0.0 < alpha < 1.0:
            raise DomainError(f"stable index must lie in (0, 1), got {alpha}")
        c = -1.0 / special.gamma(-alpha)
        return LevyTriplet(a=0.0, b=0.0, measure=LevyMeasureSpec.power(c=c, exponent=-1.0 - alpha))

    def eval(self, f: LevyTriplet, lam: float, cfg: Optional[QuadratureConfig] = None) -> float:
        """f(lam) for lam >= 0; f(0) is the killing rate"""
        if not lam >= 0 or not math.isfinite(lam):
            raise DomainError(f"Bernstein functions are evaluated on [0, inf), got {lam}")
        if lam == 0:
            return f.a
        return f.a + f.b * lam + self.jump_integral(f.measure, lam, cfg)

    def eval_many(self, f: LevyTriplet, lams: Sequence[float], cfg: Optional[QuadratureConfig] = None) -> np.ndarray:
        return np.array([self.eval(f, lam, cfg) for lam in lams], dtype=float)

    def eval_limit_at_zero(self, f: LevyTriplet) -> float:
        return f.a

    def jump_integral(self, measure: LevyMeasureSpec, lam: float, cfg: Optional[QuadratureConfig] = None) -> float:
        """int_(0,inf) (1 - exp(-lam*t)) mu(dt)"""
        if measure.kind == LevyMeasureKind.ZERO or lam == 0:
            return 0.0
        if measure.kind == LevyMeasureKind.ATOMIC:
            atoms = measure.atoms
            if len(atoms) == 0:
                return 0.0
            return float(np.sum(atoms.weights * -np.expm1(-lam * atoms.locations)))
        return self._power_integral(measure, lam, cfg or QuadratureConfig())

    def power_cutoffs(self, measure: LevyMeasureSpec, lam: float) -> Tuple[float, float]:
        """
        [t_min, t_max] outside of which the power density contributes less than
        HEAD_TOLERANCE and TAIL_TOLERANCE to f(lam).
        """
        beta = measure.stability_index
        # int_0^t_min lam*t * c*t**(-1-beta) dt = HEAD_TOLERANCE
        t_min = (HEAD_TOLERANCE * (1.0 - beta) / (lam * measure.c)) ** (1.0 / (1.0 - beta))
        # int_t_max^inf c*t**(-1-beta) dt = TAIL_TOLERANCE
        t_max = (measure.c / (beta * TAIL_TOLERANCE)) ** (1.0 / beta)
        return min(t_min, 0.5), max(t_max, 2.0)

    def _power_integral(self, measure: LevyMeasureSpec, lam: float, cfg: QuadratureConfig) -> float:
        beta = measure.stability_index
        c = measure.c
        t_min, t_max = self.power_cutoffs(measure, lam)

        def integrate(level_cfg: QuadratureConfig) -> np.ndarray:
            total = 0.0
            for lower, upper in ((t_min, 1.0), (1.0, t_max)):
                nodes, weights = self.quadrature.panel_rule(
                    lower, upper, level_cfg.panels, level_cfg.nodes_per_panel, Grading.LOGARITHMIC
                )
                total += float(np.sum(weights * -np.expm1(-lam * nodes) * c * nodes ** measure.exponent))
            return np.array([total])

        value = float(self.quadrature.refine_until_converged(integrate, cfg, EVAL_RTOL, 'bernstein eval')[0])

        # two-term expansion of 1 - exp(-lam*t) below t_min
        head = c * (lam * t_min ** (1.0 - beta) / (1.0 - beta) - lam ** 2 * t_min ** (2.0 - beta) / (2.0 * (2.0 - beta)))
        # beyond t_max, 1 - exp(-lam*t) is 1 to double precision once lam*t_max is large
        tail = c * t_max ** (-beta) / beta if lam * t_max > 40.0 else 0.0
        return value + head + tail

    def levy_integrability(self, f: LevyTriplet) -> float:
        """int min(1, t) mu(dt), finite for every valid triplet"""
        measure = f.measure
        if measure.kind == LevyMeasureKind.ZERO:
            return 0.0
        if measure.kind == LevyMeasureKind.ATOMIC:
            atoms = measure.atoms
            return float(np.sum(atoms.weights * np.minimum(1.0, atoms.locations))) if len(atoms) else 0.0
        beta = measure.stability_index
        return measure.c * (1.0 / (1.0 - beta) + 1.0 / beta)

    def levy_mass(self, f: LevyTriplet, lower: float, upper: float) -> float:
        """mu([lower, upper)) for 0 < lower < upper <= inf"""
        if not 0.0 < lower < upper:
            raise DomainError(f"need 0 < lower < upper, got [{lower}, {upper})")
        measure = f.measure
        if measure.kind == LevyMeasureKind.ZERO:
            return 0.0
        if measure.kind == LevyMeasureKind.ATOMIC:
            atoms = measure.atoms
            inside = (atoms.locations >= lower) & (atoms.locations < upper)
            return float(np.sum(atoms.weights[inside]))
        beta = measure.stability_index
        upper_term = 0.0 if math.isinf(upper) else upper ** (-beta)
        return measure.c * (lower ** (-beta) - upper_term) / beta

    def check_bernstein_signs(
        self,
        f: Optional[LevyTriplet],
        k_max: int,
        grid: Sequence[float],
        evaluator: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        cfg: Optional[QuadratureConfig] = None
    ) -> bool:
        """
        Test (-1)**(k-1) * [l_0..l_k]f >= 0 for k = 1..k_max with Newton divided
        differences on grid. A value counts as violating only when it is below
        -SIGN_TOLERANCE times the largest difference of that order and below the
        rounding noise propagated from the function values.

        Args:
            f: triplet to evaluate (ignored when evaluator is given)
            k_max: highest difference order, at most 4
            grid: strictly increasing positive points
            evaluator: replaces f, maps the grid array to function values
        """
        if not 1 <= k_max <= MAX_SIGN_ORDER:
            raise DomainError(f"k_max must lie in 1..{MAX_SIGN_ORDER}, got {k_max}")
        points = np.asarray(grid, dtype=float)
        if points.ndim != 1 or points.size < k_max + 1:
            raise DomainError(f"need at least {k_max + 1} grid points")
        if np.any(points <= 0) or np.any(np.diff(points) <= 0):
            raise DomainError("grid must be positive and strictly increasing")

        if evaluator is not None:
            values = np.asarray(evaluator(points), dtype=float)
        else:
            if f is None:
                raise DomainError("need a triplet or an evaluator")
            values = self.eval_many(f, points, cfg)

        differences = values
        noise = VALUE_RTOL * np.abs(values)
        for k in range(1, k_max + 1):
            spans = points[k:] - points[:-k]
            differences = np.diff(differences) / spans
            noise = (noise[1:] + noise[:-1]) / spans
            scale = float(np.max(np.abs(differences)))
            signed = (-1) ** (k - 1) * differences
            allowed = np.maximum(SIGN_TOLERANCE * scale, noise)
            if np.any(signed < -allowed):
                logger.info(f"Sign pattern violated at difference order {k}")
                return False
        return True

    def yosida_approximation(self, f: LevyTriplet, lam: float, n: int, cfg: Optional[QuadratureConfig] = None) -> float:
        """
        f_n(lam) = n * (1 - exp(-f(lam)/n)), a bounded Bernstein function with
        f_n <= f and f_n -> f as n grows.
        """
        if n < 1:
            raise DomainError(f"approximation index must be positive, got {n}")
        value = self.eval(f, lam, cfg)
        return float(-n * math.expm1(-value / n))


# Create a singleton instance for import
bernstein_service = BernsteinService()
