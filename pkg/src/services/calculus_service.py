"""
Subordination calculus: S_t x = int T_s x mu_t(ds), f(A)x through the
Levy-Khintchine integral, resolvents as Laplace transforms of the
semigroup, and the finite-difference checks that tie them together.
"""
import logging
import math
from typing import Callable, List, Optional, Sequence

import numpy as np

from models.bernstein import LevyMeasureKind, LevyMeasureSpec, LevyTriplet
from models.calculus import GeneratorReport, PhillipsReport, SubordinationPlan
from models.measure import DiscreteMeasure, Grading, QuadratureConfig
from models.semigroup import SemigroupSpec, StateVector
from models.subordinator import ContourConfig, SubordinatorFamily
from services.bernstein_service import BernsteinService, bernstein_service
from services.quadrature_service import (
    COMPENSATION_THRESHOLD,
    QuadratureService,
    WeightedAccumulator,
    quadrature_service,
)
from services.semigroup_service import SemigroupService, semigroup_service
from services.subordinator_service import SubordinatorService, subordinator_service
from utils.errors import DomainError
from utils.parallel import ordered_map

logger = logging.getLogger(__name__)

BLOCK_SIZE = 256  # atoms or nodes per concurrent task
F_OF_A_HEAD_TOLERANCE = 1e-8
F_OF_A_TAIL_TOLERANCE = 1e-8
F_OF_A_RTOL = 1e-5
RESOLVENT_DECAY = 40.0  # integrate exp(-lam*t) up to t = 40/lam
RESOLVENT_RTOL = 1e-5
PHILLIPS_STEPS = (0.1, 0.05, 0.025, 0.0125)
PHILLIPS_TAIL = 1e-8
PHILLIPS_ATOMS = 4000


class CalculusService:
    def __init__(
        self,
        semigroups: Optional[SemigroupService] = None,
        subordinators: Optional[SubordinatorService] = None,
        bernstein: Optional[BernsteinService] = None,
        quadrature: Optional[QuadratureService] = None
    ):
        self.semigroups = semigroups or semigroup_service
        self.subordinators = subordinators or subordinator_service
        self.bernstein = bernstein or bernstein_service
        self.quadrature = quadrature or quadrature_service

    # Subordinated semigroup

    def subordinate_apply(self, T: SemigroupSpec, plan: SubordinationPlan, t: float, x: StateVector,
                          contour: Optional[ContourConfig] = None) -> StateVector:
        """S_t x with mu_t replaced by its discretization; S_0 x is x"""
        if not t >= 0 or not math.isfinite(t):
            raise DomainError(f"time must be finite and nonnegative, got {t}")
        self.semigroups.check_compatible(T, x)
        if t == 0:
            return x
        measure = self.subordinators.discretize(plan.family, t, plan.epsilon_tail, plan.n_atoms, contour)
        return self.integrate_semigroup(T, measure, x)

    def integrate_semigroup(self, T: SemigroupSpec, measure: DiscreteMeasure, x: StateVector) -> StateVector:
        """
        sum_i w_i T_{s_i} x. Blocks of atoms run concurrently; block sums are
        combined in ascending order with compensation for long measures.
        """
        self.semigroups.check_compatible(T, x)
        if len(measure) == 0:
            return x.with_samples(np.zeros_like(x.samples))

        def block_sum(block: slice) -> np.ndarray:
            locations = measure.locations[block]
            weights = measure.weights[block]
            if locations.size == 1:
                return weights[0] * self.semigroups.apply(T, float(locations[0]), x).samples
            values = self.semigroups.apply_many(T, locations, x)
            values[locations == 0.0] = x.samples
            return np.tensordot(weights, values, axes=(0, 0))

        blocks = [slice(start, start + BLOCK_SIZE) for start in range(0, len(measure), BLOCK_SIZE)]
        accumulator = WeightedAccumulator(compensated=len(measure) > COMPENSATION_THRESHOLD)
        for partial in ordered_map(block_sum, blocks):
            accumulator.add(partial)
        return x.with_samples(accumulator.result())

    # Bernstein functions of the generator

    def f_of_A_apply(self, T: SemigroupSpec, f: LevyTriplet, x: StateVector,
                     cfg: Optional[QuadratureConfig] = None) -> StateVector:
        """a*x + b*Ax + int (x - T_t x) mu(dt)"""
        self.semigroups.check_compatible(T, x)
        generator = self.semigroups.generator_apply(T, x)
        result = f.a * x.samples + f.b * generator.samples

        measure = f.measure
        if measure.kind == LevyMeasureKind.ATOMIC:
            accumulator = WeightedAccumulator(compensated=len(measure.atoms) > COMPENSATION_THRESHOLD)
            for location, weight in measure.atoms.atoms:
                accumulator.add(weight * self.semigroups.increment_apply(T, location, x).samples)
            if accumulator.result() is not None:
                result = result + accumulator.result()
        elif measure.kind == LevyMeasureKind.POWER:
            result = result + self._power_jumps(T, measure, x, generator, cfg or QuadratureConfig())
        return x.with_samples(result)

    def _power_jumps(self, T: SemigroupSpec, measure: LevyMeasureSpec, x: StateVector, generator: StateVector,
                     cfg: QuadratureConfig) -> np.ndarray:
        x_norm = self.semigroups.sup_norm(x)
        if x_norm == 0:
            return np.zeros_like(x.samples)
        beta = measure.stability_index
        c = measure.c
        generator_norm = self.semigroups.sup_norm(generator)

        # ||x - T_t x|| <= t*||Ax|| below t_min, <= 2||x|| above t_max
        if generator_norm > 0:
            t_min = (F_OF_A_HEAD_TOLERANCE * (1.0 - beta) / (c * generator_norm)) ** (1.0 / (1.0 - beta))
        else:
            t_min = 1e-12
        t_min = min(t_min, 0.5)
        t_max = max((2.0 * c * x_norm / (beta * F_OF_A_TAIL_TOLERANCE)) ** (1.0 / beta), 2.0)
        logger.debug(f"f(A) jump integral on [{t_min:.3e}, {t_max:.3e}]")

        def integrate(level_cfg: QuadratureConfig) -> np.ndarray:
            parts = [
                self.quadrature.panel_rule(lower, upper, level_cfg.panels, level_cfg.nodes_per_panel,
                                           Grading.LOGARITHMIC)
                for lower, upper in ((t_min, 1.0), (1.0, t_max))
            ]
            nodes = np.concatenate([part[0] for part in parts])
            weights = np.concatenate([part[1] for part in parts]) * c * nodes ** measure.exponent
            return self._weighted_increments(T, nodes, weights, x)

        jumps = self.quadrature.refine_until_converged(integrate, cfg, F_OF_A_RTOL, 'f(A) jump integral')
        # x - T_t x ~ t*Ax on [0, t_min]
        head = c * t_min ** (1.0 - beta) / (1.0 - beta) * generator.samples
        return jumps + head

    def _weighted_increments(self, T: SemigroupSpec, nodes: np.ndarray, weights: np.ndarray,
                             x: StateVector) -> np.ndarray:
        def block_sum(block: slice) -> np.ndarray:
            total = np.zeros_like(x.samples)
            for node, weight in zip(nodes[block], weights[block]):
                total = total + weight * self.semigroups.increment_apply(T, float(node), x).samples
            return total

        blocks = [slice(start, start + BLOCK_SIZE) for start in range(0, nodes.size, BLOCK_SIZE)]
        accumulator = WeightedAccumulator(compensated=True)
        for partial in ordered_map(block_sum, blocks):
            accumulator.add(partial)
        return accumulator.result()

    def spectral_function_apply(self, T: SemigroupSpec, g: Callable[[np.ndarray], np.ndarray],
                                x: StateVector) -> StateVector:
        """g(A)x through the eigendecomposition; the reference for matrix testbeds"""
        return self.semigroups.spectral_apply(T, g, x)

    # Resolvents

    def resolvent_apply(self, T: SemigroupSpec, lam: float, x: StateVector,
                        cfg: Optional[QuadratureConfig] = None) -> StateVector:
        """(lam + A)^{-1} x = int_0^inf exp(-lam*t) T_t x dt"""
        self.semigroups.check_compatible(T, x)
        return self._laplace_of_orbit(lam, x, lambda times: self.semigroups.apply_many(T, times, x), cfg)

    def subordinated_resolvent_apply(self, T: SemigroupSpec, plan: SubordinationPlan, lam: float, x: StateVector,
                                     cfg: Optional[QuadratureConfig] = None,
                                     contour: Optional[ContourConfig] = None) -> StateVector:
        """(lam + f(A))^{-1} x = int_0^inf exp(-lam*t) S_t x dt"""
        self.semigroups.check_compatible(T, x)

        def orbit(times: np.ndarray) -> np.ndarray:
            return np.stack([self.subordinate_apply(T, plan, float(t), x, contour).samples for t in times])

        return self._laplace_of_orbit(lam, x, orbit, cfg, concurrent=False)

    def _laplace_of_orbit(self, lam: float, x: StateVector, orbit: Callable[[np.ndarray], np.ndarray],
                          cfg: Optional[QuadratureConfig], concurrent: bool = True) -> StateVector:
        if not lam > 0 or not math.isfinite(lam):
            raise DomainError(f"resolvent parameter must be positive, got {lam}")
        cfg = cfg or QuadratureConfig()
        upper = RESOLVENT_DECAY / lam

        def integrate(level_cfg: QuadratureConfig) -> np.ndarray:
            if level_cfg.grading == Grading.LOGARITHMIC:
                nodes, weights = self.quadrature.origin_graded_rule(
                    upper, level_cfg.panels, level_cfg.nodes_per_panel, upper * 1e-8
                )
            else:
                nodes, weights = self.quadrature.panel_rule(
                    0.0, upper, level_cfg.panels, level_cfg.nodes_per_panel, Grading.UNIFORM
                )
            weights = weights * np.exp(-lam * nodes)

            def block_sum(block: slice) -> np.ndarray:
                return np.tensordot(weights[block], orbit(nodes[block]), axes=(0, 0))

            blocks = [slice(start, start + BLOCK_SIZE) for start in range(0, nodes.size, BLOCK_SIZE)]
            partials = ordered_map(block_sum, blocks) if concurrent else [block_sum(block) for block in blocks]
            accumulator = WeightedAccumulator(compensated=True)
            for partial in partials:
                accumulator.add(partial)
            return accumulator.result()

        return x.with_samples(self.quadrature.refine_until_converged(integrate, cfg, RESOLVENT_RTOL, 'resolvent'))

    # Difference quotients

    def generator_fd(self, apply_fn: Callable[[float, StateVector], StateVector], x: StateVector,
                     h_values: Sequence[float], reference: StateVector) -> GeneratorReport:
        """
        Errors of (x - apply_fn(h, x))/h against reference for each h, the
        log-log slope of those errors and the error after one Richardson step
        on the two smallest h.
        """
        quotients = self._quotients(apply_fn, x, h_values)
        h = [float(value) for value in h_values]
        errors = [self._distance(quotient, reference.samples) for quotient in quotients]

        if all(error > 0 for error in errors):
            order = float(np.polyfit(np.log(h), np.log(errors), 1)[0])
        else:
            order = math.nan
        ratio = h[-2] / h[-1]
        extrapolated = (ratio * quotients[-1] - quotients[-2]) / (ratio - 1.0)
        return GeneratorReport(
            h_values=h,
            errors=errors,
            estimated_order=order,
            extrapolated_error=self._distance(extrapolated, reference.samples)
        )

    def _quotients(self, apply_fn: Callable[[float, StateVector], StateVector], x: StateVector,
                   h_values: Sequence[float]) -> List[np.ndarray]:
        h = [float(value) for value in h_values]
        if len(h) < 2:
            raise DomainError("need at least two step sizes")
        if any(value <= 0 for value in h) or any(later >= earlier for earlier, later in zip(h, h[1:])):
            raise DomainError("step sizes must be positive and strictly decreasing")
        return [(x.samples - apply_fn(step, x).samples) / step for step in h]

    def _extrapolate_to_zero(self, h: Sequence[float], values: Sequence[np.ndarray]) -> np.ndarray:
        """Neville's scheme: value at 0 of the polynomial through (h_i, values_i)"""
        table = [np.array(value, dtype=float) for value in values]
        n = len(table)
        for level in range(1, n):
            for i in range(n - level):
                table[i] = (h[i] * table[i + 1] - h[i + level] * table[i]) / (h[i] - h[i + level])
        return table[0]

    def _distance(self, first: np.ndarray, second: np.ndarray) -> float:
        return float(np.max(np.abs(first - second), initial=0.0))

    def phillips_check(self, T: SemigroupSpec, alpha: float, x: StateVector,
                       plan: Optional[SubordinationPlan] = None,
                       cfg: Optional[QuadratureConfig] = None,
                       h_values: Sequence[float] = PHILLIPS_STEPS) -> PhillipsReport:
        """Generator of the alpha-stable subordinated semigroup against A**alpha x"""
        plan = plan or SubordinationPlan(
            family=SubordinatorFamily.stable(alpha), epsilon_tail=PHILLIPS_TAIL, n_atoms=PHILLIPS_ATOMS
        )
        return self.phillips_check_triplet(T, plan, self.bernstein.stable_triplet(alpha), x, cfg, h_values)

    def phillips_check_triplet(self, T: SemigroupSpec, plan: SubordinationPlan, f: LevyTriplet, x: StateVector,
                               cfg: Optional[QuadratureConfig] = None,
                               h_values: Sequence[float] = PHILLIPS_STEPS) -> PhillipsReport:
        """
        Compare (x - S_h x)/h, extrapolated to h = 0 through every step size,
        with f(A)x. plan.family must be the family belonging to f.
        """
        reference = self.f_of_A_apply(T, f, x, cfg)

        def subordinated(step: float, state: StateVector) -> StateVector:
            return self.subordinate_apply(T, plan, step, state)

        quotients = self._quotients(subordinated, x, h_values)
        h = [float(value) for value in h_values]
        errors = [self._distance(quotient, reference.samples) for quotient in quotients]
        order = float(np.polyfit(np.log(h), np.log(errors), 1)[0]) if all(e > 0 for e in errors) else math.nan

        ratio = h[-2] / h[-1]
        two_step = (ratio * quotients[-1] - quotients[-2]) / (ratio - 1.0)
        extrapolated = self._extrapolate_to_zero(h, quotients)

        report = PhillipsReport(
            lhs_rhs_error=self._distance(extrapolated, reference.samples),
            order=order,
            two_step_error=self._distance(two_step, reference.samples),
            h_values=h,
            quotient_errors=errors
        )
        logger.info(f"Generator check: extrapolated error {report.lhs_rhs_error:.3e}, order {report.order:.3f}")
        return report

    # Structural checks

    def rescaling_check(self, T: SemigroupSpec, a: float, alpha: float, t: float, x: StateVector,
                        epsilon_tail: Optional[float] = None, n_atoms: Optional[int] = None,
                        contour: Optional[ContourConfig] = None) -> float:
        """sup | S^{a + l**alpha}_t x - exp(-t*a) S^{l**alpha}_t x |"""
        if a < 0:
            raise DomainError(f"killing rate must be nonnegative, got {a}")
        overrides = {}
        if epsilon_tail is not None:
            overrides['epsilon_tail'] = epsilon_tail
        if n_atoms is not None:
            overrides['n_atoms'] = n_atoms
        killed = SubordinationPlan(family=SubordinatorFamily.killed_stable(a, alpha), **overrides)
        stable = SubordinationPlan(family=SubordinatorFamily.stable(alpha), **overrides)
        lhs = self.subordinate_apply(T, killed, t, x, contour)
        rhs = self.subordinate_apply(T, stable, t, x, contour)
        return self._distance(lhs.samples, math.exp(-t * a) * rhs.samples)

    def commutation_check(self, T: SemigroupSpec, plan: SubordinationPlan, s: float, t: float, x: StateVector,
                          contour: Optional[ContourConfig] = None) -> float:
        """sup | T_s S_t x - S_t T_s x |"""
        lhs = self.semigroups.apply(T, s, self.subordinate_apply(T, plan, t, x, contour))
        rhs = self.subordinate_apply(T, plan, t, self.semigroups.apply(T, s, x), contour)
        return self._distance(lhs.samples, rhs.samples)


# Create a singleton instance for import
calculus_service = CalculusService()
