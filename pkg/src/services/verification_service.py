"""
Acceptance suite behind `subfn verify`: oracle and property checks across
every service, each reported as measured error against tolerance.
"""
import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from models.calculus import SubordinationPlan
from models.measure import Grading, QuadratureConfig
from models.response import CheckResult, VerifyReport
from models.run_config import Suite
from models.semigroup import SemigroupSpec, StateVector
from models.subordinator import SubordinatorFamily
from services.bernstein_service import BernsteinService, bernstein_service
from services.calculus_service import CalculusService, calculus_service
from services.quadrature_service import QuadratureService, quadrature_service
from services.semigroup_service import SemigroupService, semigroup_service
from services.subordinator_service import SubordinatorService, subordinator_service
from utils.errors import SubfnError

logger = logging.getLogger(__name__)

ALL_ALPHAS = (0.3, 0.5, 0.7)
TIMES = (0.5, 1.0, 2.0)
LAPLACE_POINTS = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0)
CONVOLUTION_PAIRS = ((0.5, 0.5), (0.5, 1.0))
CONVOLUTION_ATOMS = 2000
BIN_WIDTH = 1e-6
TESTBED_SIZE = 8
RANDOM_VECTORS = 5
SEED = 20240611


class VerificationService:
    def __init__(
        self,
        bernstein: Optional[BernsteinService] = None,
        subordinators: Optional[SubordinatorService] = None,
        semigroups: Optional[SemigroupService] = None,
        calculus: Optional[CalculusService] = None,
        quadrature: Optional[QuadratureService] = None
    ):
        self.bernstein = bernstein or bernstein_service
        self.subordinators = subordinators or subordinator_service
        self.semigroups = semigroups or semigroup_service
        self.calculus = calculus or calculus_service
        self.quadrature = quadrature or quadrature_service

    def run(self, suite: Suite = Suite.FAST) -> VerifyReport:
        """
        Run every check; the fast suite limits the density-based sweeps to
        alpha = 1/2. A group that raises is recorded as one failed check.
        """
        full = suite == Suite.FULL
        sweep_alphas = ALL_ALPHAS if full else (0.5,)
        checks: List[CheckResult] = []
        runners: List[Tuple[str, Callable[[], List[CheckResult]]]] = [
            ('bernstein_eval', self.check_bernstein_oracle),
            ('contour_vs_closed_form', self.check_contour_closed_form),
            ('laplace_identity', lambda: self.check_laplace_identity(sweep_alphas)),
            ('convolution_law', lambda: self.check_convolution_law(sweep_alphas)),
            ('mass_identity', self.check_mass_identity),
            ('f_of_A_oracle', self.check_f_of_A_oracle),
            ('subordination_oracle', lambda: self.check_subordination_oracle(sweep_alphas)),
            ('phillips', lambda: self.check_phillips(sweep_alphas)),
            ('fourier_oracle', self.check_fourier_oracle),
            ('resolvent', self.check_resolvent),
            ('trivial_subordinations', self.check_trivial_subordinations),
            ('semigroup_law', lambda: self.check_semigroup_law(full)),
            ('rescaling', lambda: self.check_rescaling(sweep_alphas)),
            ('bernstein_signs', self.check_bernstein_signs),
        ]
        if full:
            runners.append(('subordinated_resolvent', self.check_subordinated_resolvent))
        for name, runner in runners:
            try:
                results = runner()
            except SubfnError as e:
                logger.error(f"{name} raised {type(e).__name__}: {str(e)}")
                results = [self._result(name, math.nan, 0.0, detail=f"{type(e).__name__}: {str(e)}")]
            for result in results:
                logger.info(f"{result.name}: {'PASS' if result.passed else 'FAIL'} ({result.measured:.3e})")
            checks.extend(results)
        return VerifyReport(suite=suite.value, checks=checks)

    def format_table(self, report: VerifyReport) -> str:
        width = max(len(check.name) for check in report.checks) if report.checks else 10
        lines = [f"{'check':<{width}}  status  {'measured':>10}  {'tolerance':>9}"]
        for check in report.checks:
            status = 'PASS' if check.passed else 'FAIL'
            lines.append(f"{check.name:<{width}}  {status:<6}  {check.measured:>10.3e}  {check.tolerance:>9.1e}")
        passed = sum(check.passed for check in report.checks)
        lines.append(f"{passed}/{len(report.checks)} checks passed ({report.suite} suite)")
        return '\n'.join(lines)

    # Testbeds

    def _result(self, name: str, measured: float, tolerance: float, detail: Optional[str] = None) -> CheckResult:
        passed = bool(measured <= tolerance) and not math.isnan(measured)
        return CheckResult(name=name, measured=float(measured), tolerance=tolerance, passed=passed, detail=detail)

    def _dirichlet(self) -> SemigroupSpec:
        return SemigroupSpec.from_matrix(self.semigroups.dirichlet_laplacian(TESTBED_SIZE))

    def _unit_vectors(self) -> List[StateVector]:
        rng = np.random.default_rng(SEED)
        vectors = []
        for _ in range(RANDOM_VECTORS):
            entries = rng.standard_normal(TESTBED_SIZE)
            vectors.append(StateVector.finite(entries / np.linalg.norm(entries)))
        return vectors

    def _sup(self, values: np.ndarray) -> float:
        return float(np.max(np.abs(values), initial=0.0))

    # Checks

    def check_bernstein_oracle(self) -> List[CheckResult]:
        lams = np.logspace(-1.0, 1.0, 21)
        results = []
        for alpha in ALL_ALPHAS:
            f = self.bernstein.stable_triplet(alpha)
            values = self.bernstein.eval_many(f, lams)
            error = float(np.max(np.abs(values - lams ** alpha) / lams ** alpha))
            results.append(self._result(f"bernstein_eval alpha={alpha}", error, 1e-6))
        return results

    def check_contour_closed_form(self) -> List[CheckResult]:
        s = np.logspace(math.log10(0.05), math.log10(20.0), 40)
        error = 0.0
        for t in TIMES:
            contour = self.subordinators.contour_density_array(0.5, t, s)
            error = max(error, self._sup(contour - self.subordinators.stable_density_closed_form(t, s)))
        return [self._result("contour_vs_closed_form", error, 1e-6)]

    def check_laplace_identity(self, alphas: Sequence[float]) -> List[CheckResult]:
        results = []
        for alpha in alphas:
            family = SubordinatorFamily.stable(alpha)
            plan = SubordinationPlan(family=family)
            error = 0.0
            for t in TIMES:
                measure = self.subordinators.discretize(family, t, plan.epsilon_tail, plan.n_atoms)
                for lam in LAPLACE_POINTS:
                    exact = math.exp(-t * lam ** alpha)
                    error = max(error, abs(self.quadrature.laplace_transform(measure, lam) - exact))
            results.append(self._result(f"laplace_identity alpha={alpha}", error, 1e-4))
        return results

    def check_convolution_law(self, alphas: Sequence[float]) -> List[CheckResult]:
        results = []
        for alpha in alphas:
            family = SubordinatorFamily.stable(alpha)
            plan = SubordinationPlan(family=family, n_atoms=CONVOLUTION_ATOMS)
            error = 0.0
            for t, s in CONVOLUTION_PAIRS:
                first = self.subordinators.discretize(family, t, plan.epsilon_tail, plan.n_atoms)
                second = self.subordinators.discretize(family, s, plan.epsilon_tail, plan.n_atoms)
                combined = self.subordinators.discretize(family, t + s, plan.epsilon_tail, plan.n_atoms)
                convolved = self.quadrature.convolve(first, second, BIN_WIDTH)
                for lam in LAPLACE_POINTS:
                    error = max(error, abs(self.quadrature.laplace_transform(convolved, lam)
                                           - self.quadrature.laplace_transform(combined, lam)))
            results.append(self._result(f"convolution_law alpha={alpha}", error, 5e-4))
        return results

    def check_mass_identity(self) -> List[CheckResult]:
        a, t, alpha = math.log(2.0), 1.0, 0.5
        family = SubordinatorFamily.killed_stable(a, alpha)
        exact_error = abs(self.subordinators.mass(family, t) - math.exp(-t * a))

        plan = SubordinationPlan(family=family)
        discretized = self.subordinators.discretize(family, t, plan.epsilon_tail, plan.n_atoms)
        exact = math.exp(-a * t)
        lower = exact * (1.0 - 2.0 * plan.epsilon_tail)
        upper = exact * (1.0 + 1e-6)
        outside = max(0.0, lower - discretized.mass, discretized.mass - upper)
        return [
            self._result("mass_identity exact", exact_error, 0.0),
            self._result("mass_identity discretized", outside, 0.0, detail=f"mass {discretized.mass:.12f}"),
        ]

    def check_f_of_A_oracle(self) -> List[CheckResult]:
        T = self._dirichlet()
        results = []
        for alpha in ALL_ALPHAS:
            f = self.bernstein.stable_triplet(alpha)
            error = 0.0
            for x in self._unit_vectors():
                computed = self.calculus.f_of_A_apply(T, f, x)
                oracle = self.calculus.spectral_function_apply(T, lambda values: values ** alpha, x)
                error = max(error, self._sup(computed.samples - oracle.samples) / self.semigroups.sup_norm(x))
            results.append(self._result(f"f_of_A_oracle alpha={alpha}", error, 1e-4))
        return results

    def check_subordination_oracle(self, alphas: Sequence[float]) -> List[CheckResult]:
        T = self._dirichlet()
        x = self._unit_vectors()[0]
        results = []
        for alpha in alphas:
            plan = SubordinationPlan(family=SubordinatorFamily.stable(alpha))
            error = 0.0
            for t in (0.5, 1.0):
                computed = self.calculus.subordinate_apply(T, plan, t, x)
                oracle = self.calculus.spectral_function_apply(T, lambda values: np.exp(-t * values ** alpha), x)
                error = max(error, self._sup(computed.samples - oracle.samples))
            results.append(self._result(f"subordination_oracle alpha={alpha}", error, 1e-4))
        return results

    def check_phillips(self, alphas: Sequence[float]) -> List[CheckResult]:
        T = SemigroupSpec.from_matrix(np.diag([1.0, 4.0]))
        x = StateVector.finite([1.0, 1.0])
        results = []
        for alpha in alphas:
            report = self.calculus.phillips_check(T, alpha, x)
            results.append(self._result(f"phillips_matrix alpha={alpha}", report.lhs_rhs_error, 1e-3))
            # the raw quotient error decays like h**1
            results.append(self._result(f"phillips_order alpha={alpha}", abs(report.order - 1.0), 0.2,
                                        detail=f"order {report.order:.3f}"))
        heat = self.calculus.phillips_check(SemigroupSpec.heat(1), 0.5, self.semigroups.periodic_grid())
        results.append(self._result("phillips_heat alpha=0.5", heat.lhs_rhs_error, 1e-2))
        return results

    def check_fourier_oracle(self) -> List[CheckResult]:
        T = SemigroupSpec.heat(1)
        x = self.semigroups.periodic_grid()
        plan = SubordinationPlan(family=SubordinatorFamily.stable(0.5))
        subordinated = self.calculus.subordinate_apply(T, plan, 1.0, x)
        fractional = self.calculus.f_of_A_apply(T, self.bernstein.stable_triplet(0.5), x)
        return [
            self._result("fourier_subordinate", self._sup(subordinated.samples - math.exp(-1.0) * x.samples), 1e-3),
            self._result("fourier_f_of_A", self._sup(fractional.samples - x.samples), 1e-3),
        ]

    def check_resolvent(self) -> List[CheckResult]:
        T = self._dirichlet()
        x = self._unit_vectors()[0]
        matrix = np.asarray(T.matrix)
        error = 0.0
        for lam in (0.5, 1.0, 5.0):
            resolved = self.calculus.resolvent_apply(T, lam, x).samples
            error = max(error, self._sup(lam * resolved + matrix @ resolved - x.samples))
        lam = 1e3
        resolved = self.calculus.resolvent_apply(T, lam, x).samples
        large = self._sup(lam * resolved - x.samples) / self.semigroups.sup_norm(x)
        return [
            self._result("resolvent_identity", error, 1e-6),
            self._result("resolvent_large_lambda", large, 1e-2),
        ]

    def check_trivial_subordinations(self) -> List[CheckResult]:
        T = self._dirichlet()
        x = self._unit_vectors()[0]
        t, a = 0.7, 0.3
        drift = SubordinationPlan(family=SubordinatorFamily.drift_killing(b=1.0))
        killing = SubordinationPlan(family=SubordinatorFamily.drift_killing(a=a))
        drift_error = self._sup(self.calculus.subordinate_apply(T, drift, t, x).samples
                                - self.semigroups.apply(T, t, x).samples)
        killing_error = self._sup(self.calculus.subordinate_apply(T, killing, t, x).samples
                                  - math.exp(-a * t) * x.samples)
        return [
            self._result("trivial_drift", drift_error, 1e-15),
            self._result("trivial_killing", killing_error, 1e-15),
        ]

    def check_semigroup_law(self, full: bool) -> List[CheckResult]:
        pairs = [(t, s) for t in (0.25, 0.5, 1.0) for s in (0.25, 0.5, 1.0)] if full else [(0.25, 0.5), (0.5, 1.0)]
        testbeds = (
            ("matrix", self._dirichlet(), self._unit_vectors()[0]),
            ("heat", SemigroupSpec.heat(1), self.semigroups.periodic_grid()),
        )
        results = []
        for label, T, x in testbeds:
            plan = SubordinationPlan(family=SubordinatorFamily.stable(0.5))
            x_norm = self.semigroups.sup_norm(x)
            law_error = 0.0
            growth = 0.0
            for t, s in pairs:
                inner = self.calculus.subordinate_apply(T, plan, s, x)
                outer = self.calculus.subordinate_apply(T, plan, t, inner)
                direct = self.calculus.subordinate_apply(T, plan, t + s, x)
                law_error = max(law_error, self._sup(outer.samples - direct.samples) / x_norm)
                growth = max(growth, self.semigroups.sup_norm(inner) / x_norm - 1.0)
            results.append(self._result(f"semigroup_law {label}", law_error, 1e-3))
            results.append(self._result(f"contractivity {label}", max(growth, 0.0), 1e-9))
        return results

    def check_rescaling(self, alphas: Sequence[float]) -> List[CheckResult]:
        T = self._dirichlet()
        x = self._unit_vectors()[0]
        results = []
        for alpha in alphas:
            error = self.calculus.rescaling_check(T, math.log(2.0), alpha, 1.0, x)
            results.append(self._result(f"rescaling alpha={alpha}", error / self.semigroups.sup_norm(x), 1e-6))
        return results

    def check_bernstein_signs(self) -> List[CheckResult]:
        grid = np.logspace(-1.0, 1.0, 25)
        results = []
        for alpha in ALL_ALPHAS:
            holds = self.bernstein.check_bernstein_signs(self.bernstein.stable_triplet(alpha), 4, grid)
            results.append(self._result(f"bernstein_signs alpha={alpha}", 0.0 if holds else 1.0, 0.0))
        return results

    def check_subordinated_resolvent(self) -> List[CheckResult]:
        T = self._dirichlet()
        x = self._unit_vectors()[0]
        alpha, lam = 0.5, 1.0
        plan = SubordinationPlan(family=SubordinatorFamily.stable(alpha), n_atoms=1500)
        cfg = QuadratureConfig(panels=8, nodes_per_panel=16, grading=Grading.UNIFORM, max_refinements=2)
        resolved = self.calculus.subordinated_resolvent_apply(T, plan, lam, x, cfg)
        fractional = self.calculus.spectral_function_apply(T, lambda values: values ** alpha, resolved)
        error = self._sup(lam * resolved.samples + fractional.samples - x.samples)
        return [self._result("subordinated_resolvent", error, 1e-4)]


# Create a singleton instance for import
verification_service = VerificationService()
