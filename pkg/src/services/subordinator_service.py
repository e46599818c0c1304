"""
Transition laws mu_t of the subordinators behind the supported families:
densities (closed form at alpha = 1/2, contour inversion otherwise) and
their discretization into finite atomic measures.
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy import special

from models.measure import DiscreteMeasure, Grading
from models.subordinator import ContourConfig, DiscretizedSubordinator, FamilyKind, SubordinatorFamily
from services.quadrature_service import QuadratureService, gauss_legendre, quadrature_service
from utils.errors import DiscretizationError, DomainError, QuadratureFailureError
from utils.parallel import ordered_map

logger = logging.getLogger(__name__)

DECAY_EXPONENT = 50.0  # contour truncated where the integrand is below exp(-50)
NEGATIVE_FAILURE = 1e-8  # absolute floor of the tolerated negative part
NOISE_RATIO = 1e-7  # cancellation noise relative to the integrated modulus
CONTOUR_CHUNK = 256
CELL_NODES = 3  # Gauss-Legendre nodes per discretization cell
MASS_EXCESS = 1e-6  # tolerated relative overshoot of the discretized mass
MAX_HALVINGS = 200


class SubordinatorService:
    def __init__(self, quadrature: Optional[QuadratureService] = None):
        self.quadrature = quadrature or quadrature_service
        self._reported_angles = set()

    def stable_density_closed_form(self, t: float, s):
        """
        Density of the 1/2-stable law: t*exp(-t**2/(4s)) / (2*sqrt(pi)*s**1.5).
        Accepts a scalar or an array of s.
        """
        if not t > 0:
            raise DomainError(f"density needs t > 0, got {t}")
        s_array = np.asarray(s, dtype=float)
        if np.any(s_array <= 0):
            raise DomainError("density is evaluated at s > 0")
        values = t * np.exp(-t * t / (4.0 * s_array)) / (2.0 * math.sqrt(math.pi) * s_array ** 1.5)
        return float(values) if values.ndim == 0 else values

    def effective_theta(self, alpha: float, cfg: ContourConfig) -> float:
        """
        Contour angle actually used. exp(-t*w**alpha) must not grow along the
        rays, which needs alpha*theta <= pi/2; otherwise take the middle of the
        admissible range (pi/2, pi/(2*alpha)).
        """
        if math.cos(alpha * cfg.theta) >= 0.0:
            return cfg.theta
        adjusted = 0.5 * (math.pi / 2.0 + min(math.pi, math.pi / (2.0 * alpha)))
        if (alpha, cfg.theta) not in self._reported_angles:
            self._reported_angles.add((alpha, cfg.theta))
            logger.warning(f"Contour angle {cfg.theta:.4f} too wide for alpha={alpha}, using {adjusted:.4f}")
        return adjusted

    def stable_density_contour(self, alpha: float, t: float, s: float, cfg: Optional[ContourConfig] = None) -> float:
        """g_t^alpha(s) by inverting exp(-t*w**alpha) along a Hankel-type contour"""
        return float(self.contour_density_array(alpha, t, np.array([s]), cfg)[0])

    def contour_density_array(self, alpha: float, t: float, s, cfg: Optional[ContourConfig] = None) -> np.ndarray:
        """
        g_t(s) = (1/pi) int_0^R Im[exp(s*r*e^{i*theta} - t*r**alpha*e^{i*alpha*theta}) e^{i*theta}] dr
        for every s; chunks of s run concurrently.

        Where the density vanishes the integral is pure cancellation, so
        negative values are measured against the integrated modulus of the
        integrand: those within its noise are set to 0, larger ones fail.
        """
        cfg = cfg or ContourConfig()
        if not 0.0 < alpha < 1.0:
            raise DomainError(f"stable index must lie in (0, 1), got {alpha}")
        if not t > 0:
            raise DomainError(f"density needs t > 0, got {t}")
        s_array = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(s_array <= 0):
            raise DomainError("density is evaluated at s > 0")

        theta = self.effective_theta(alpha, cfg)
        chunks = [s_array[start:start + CONTOUR_CHUNK] for start in range(0, s_array.size, CONTOUR_CHUNK)]
        results = ordered_map(lambda chunk: self._contour_chunk(alpha, t, chunk, theta, cfg), chunks)
        values = np.concatenate([chunk_values for chunk_values, _ in results]) if results else np.array([])
        moduli = np.concatenate([chunk_moduli for _, chunk_moduli in results]) if results else np.array([])

        noise = np.maximum(NEGATIVE_FAILURE, NOISE_RATIO * moduli)
        if np.any(values < -noise):
            worst = int(np.argmin(values / noise))
            raise QuadratureFailureError(
                f"contour density {values[worst]:.3e} at s={s_array[worst]:.6g} below noise {noise[worst]:.3e} "
                f"(alpha={alpha}, t={t})"
            )
        return np.where(values < 0.0, 0.0, values)

    def _contour_chunk(self, alpha: float, t: float, s: np.ndarray, theta: float,
                       cfg: ContourConfig) -> Tuple[np.ndarray, np.ndarray]:
        """Contour integrals for a chunk of s, with the integrals of their moduli"""
        reference_nodes, reference_weights = gauss_legendre(cfg.nodes)
        cos_theta = math.cos(theta)
        damping = math.cos(alpha * theta)

        # beyond radius one of the two exponentials is below exp(-50)
        radius = DECAY_EXPONENT / (s * abs(cos_theta))
        if damping > 0.05:
            radius = np.minimum(radius, (DECAY_EXPONENT / (t * damping)) ** (1.0 / alpha))
        radius = cfg.r_factor * radius
        smallest = np.minimum(1e-6 * np.minimum(1.0 / s, t ** (-1.0 / alpha)), 1e-3 * radius)

        # one panel on [0, smallest], geometric panels up to radius
        fractions = np.linspace(0.0, 1.0, max(cfg.panels, 2))
        log_smallest = np.log(smallest)
        geometric = np.exp(log_smallest[:, None] + np.log(radius / smallest)[:, None] * fractions[None, :])
        edges = np.concatenate([np.zeros((s.size, 1)), geometric], axis=1)

        midpoints = 0.5 * (edges[:, 1:] + edges[:, :-1])
        half_widths = 0.5 * (edges[:, 1:] - edges[:, :-1])
        r = midpoints[:, :, None] + half_widths[:, :, None] * reference_nodes[None, None, :]
        weights = half_widths[:, :, None] * reference_weights[None, None, :]

        exponent = s[:, None, None] * r * np.exp(1j * theta) - t * r ** alpha * np.exp(1j * alpha * theta)
        integrand = np.imag(np.exp(exponent) * np.exp(1j * theta))
        values = np.sum(integrand * weights, axis=(1, 2)) / math.pi
        moduli = np.sum(np.abs(integrand) * weights, axis=(1, 2)) / math.pi
        return values, moduli

    def density(self, family: SubordinatorFamily, t: float, s, contour: Optional[ContourConfig] = None,
                closed_form: Optional[bool] = None) -> np.ndarray:
        """
        Density of mu_t for families that have one. closed_form=None picks the
        closed form whenever alpha = 1/2.
        """
        if not family.has_density:
            raise DomainError(f"{family.kind.value} family has no density")
        s_array = np.atleast_1d(np.asarray(s, dtype=float))
        use_closed_form = family.alpha == 0.5 if closed_form is None else closed_form
        if use_closed_form:
            if family.alpha != 0.5:
                raise DomainError(f"closed form only exists for alpha = 1/2, got {family.alpha}")
            values = self.stable_density_closed_form(t, s_array)
        else:
            values = self.contour_density_array(family.alpha, t, s_array, contour)
        return math.exp(-family.killing_rate * t) * np.asarray(values)

    def mass(self, family: SubordinatorFamily, t: float) -> float:
        """mu_t([0, inf)) = exp(-t * f(0+))"""
        if t < 0:
            raise DomainError(f"time must be nonnegative, got {t}")
        return math.exp(-family.killing_rate * t)

    def tail_cutoff(self, family: SubordinatorFamily, t: float, epsilon: float) -> float:
        """S with mu_t((S, inf)) ~ epsilon, from t*S**(-alpha)/Gamma(1-alpha) = epsilon"""
        if not family.has_density:
            raise DomainError(f"{family.kind.value} family has no tail")
        alpha = family.alpha
        return (t / (special.gamma(1.0 - alpha) * epsilon)) ** (1.0 / alpha)

    def lower_cutoff(self, family: SubordinatorFamily, t: float, epsilon: float,
                     contour: Optional[ContourConfig] = None) -> float:
        """
        Halve s from the natural scale t**(1/alpha) until a one-panel estimate of
        mu_t([0, s]) drops below epsilon/10.
        """
        stable = SubordinatorFamily.stable(family.alpha)
        nodes, weights = gauss_legendre(16)
        s = t ** (1.0 / family.alpha)
        for _ in range(MAX_HALVINGS):
            points = 0.5 * s * (nodes + 1.0)
            estimate = float(np.sum(0.5 * s * weights * self.density(stable, t, points, contour)))
            if estimate <= epsilon / 10.0:
                return s
            s *= 0.5
        raise DiscretizationError(f"no lower cutoff found for alpha={family.alpha}, t={t}")

    def discretize(self, family: SubordinatorFamily, t: float, epsilon_tail: float, n_atoms: int,
                   contour: Optional[ContourConfig] = None) -> DiscreteMeasure:
        return self.discretize_detailed(family, t, epsilon_tail, n_atoms, contour).measure

    def discretize_detailed(self, family: SubordinatorFamily, t: float, epsilon_tail: float, n_atoms: int,
                            contour: Optional[ContourConfig] = None) -> DiscretizedSubordinator:
        """
        Finite atomic approximation of mu_t.

        Stable laws are cut to [s_min, S_max] and split into n_atoms
        logarithmic cells; each cell becomes one atom at its centroid carrying
        the cell's mass. A killed law reuses the stable atoms scaled by
        exp(-a*t). The total mass must land in
        [exp(-a*t)*(1 - 2*epsilon_tail), exp(-a*t)*(1 + 1e-6)].
        """
        if t < 0:
            raise DomainError(f"time must be nonnegative, got {t}")
        if not 0.0 < epsilon_tail < 1e-2:
            raise DomainError(f"tail tolerance must lie in (0, 1e-2), got {epsilon_tail}")
        if n_atoms < 1:
            raise DomainError(f"need at least one atom, got {n_atoms}")

        exact_mass = self.mass(family, t)
        if t == 0:
            return DiscretizedSubordinator(measure=DiscreteMeasure.dirac(0.0), s_min=0.0, s_max=0.0, exact_mass=1.0)
        if family.kind == FamilyKind.DRIFT_KILLING:
            location = family.b * t
            return DiscretizedSubordinator(
                measure=DiscreteMeasure.dirac(location, exact_mass),
                s_min=location,
                s_max=location,
                exact_mass=exact_mass
            )
        if family.kind == FamilyKind.KILLED_STABLE:
            stable = self.discretize_detailed(SubordinatorFamily.stable(family.alpha), t, epsilon_tail, n_atoms, contour)
            return DiscretizedSubordinator(
                measure=stable.measure.scaled(exact_mass),
                s_min=stable.s_min,
                s_max=stable.s_max,
                exact_mass=exact_mass
            )
        return self._discretize_stable(family, t, epsilon_tail, n_atoms, contour)

    def _discretize_stable(self, family: SubordinatorFamily, t: float, epsilon_tail: float, n_atoms: int,
                           contour: Optional[ContourConfig]) -> DiscretizedSubordinator:
        s_max = self.tail_cutoff(family, t, epsilon_tail)
        s_min = min(self.lower_cutoff(family, t, epsilon_tail, contour), 0.5 * s_max)

        edges = np.geomspace(s_min, s_max, n_atoms + 1)
        nodes, weights = gauss_legendre(CELL_NODES)
        midpoints = 0.5 * (edges[1:] + edges[:-1])
        half_widths = 0.5 * (edges[1:] - edges[:-1])
        points = midpoints[:, None] + half_widths[:, None] * nodes[None, :]
        cell_weights = half_widths[:, None] * weights[None, :]

        densities = self.density(family, t, points.ravel(), contour).reshape(points.shape)
        masses = np.sum(densities * cell_weights, axis=1)
        moments = np.sum(points * densities * cell_weights, axis=1)
        locations = np.where(masses > 0, moments / np.where(masses > 0, masses, 1.0), np.sqrt(edges[1:] * edges[:-1]))

        total = float(np.sum(masses))
        lower_bound = 1.0 - 2.0 * epsilon_tail
        upper_bound = 1.0 + MASS_EXCESS
        logger.debug(
            f"Discretized alpha={family.alpha}, t={t}: {n_atoms} atoms on [{s_min:.3e}, {s_max:.3e}], mass {total:.12f}"
        )
        if total > upper_bound or total < lower_bound:
            raise DiscretizationError(
                f"discretized mass {total:.12f} outside [{lower_bound:.12f}, {upper_bound:.12f}] "
                f"(alpha={family.alpha}, t={t})"
            )
        if total > 1.0:
            masses = masses / total

        return DiscretizedSubordinator(
            measure=DiscreteMeasure(locations=locations, weights=masses),
            s_min=s_min,
            s_max=s_max,
            exact_mass=1.0
        )

    def rescaled_jump_mass(self, family: SubordinatorFamily, n: int, lower: float, upper: float,
                           contour: Optional[ContourConfig] = None) -> float:
        """
        n * mu_{1/n}([lower, upper)), which tends to the Levy measure of
        [lower, upper) as n grows.
        """
        if n < 1:
            raise DomainError(f"n must be positive, got {n}")
        if not 0.0 < lower < upper < math.inf:
            raise DomainError(f"need 0 < lower < upper < inf, got [{lower}, {upper})")
        t = 1.0 / n
        if family.kind == FamilyKind.DRIFT_KILLING:
            location = family.b * t
            return n * self.mass(family, t) if lower <= location < upper else 0.0
        points, weights = self.quadrature.panel_rule(lower, upper, 32, 16, Grading.LOGARITHMIC)
        return float(n * np.sum(weights * self.density(family, t, points, contour)))


# Create a singleton instance for import
subordinator_service = SubordinatorService()
