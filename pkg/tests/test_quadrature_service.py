import math

import numpy as np
import pytest

from models.measure import DiscreteMeasure, Grading, QuadratureConfig
from models.semigroup import StateVector
from services.quadrature_service import QuadratureService, WeightedAccumulator, gauss_legendre
from utils.errors import ConvergenceError, DimensionError, DomainError, ShapeError


@pytest.fixture
def quadrature():
    return QuadratureService()


class TestGaussLegendre:

    def test_rule_integrates_polynomials_exactly(self):
        nodes, weights = gauss_legendre(5)
        # degree 9 is the highest exact degree for 5 nodes
        assert np.sum(weights * nodes ** 8) == pytest.approx(2.0 / 9.0, rel=1e-14)
        assert np.sum(weights) == pytest.approx(2.0, rel=1e-15)

    def test_cached_arrays_are_read_only(self):
        nodes, _ = gauss_legendre(4)
        with pytest.raises(ValueError):
            nodes[0] = 0.0


class TestWeightedAccumulator:

    def test_compensation_recovers_lost_terms(self):
        accumulator = WeightedAccumulator(compensated=True)
        for term in (1.0, 1e100, 1.0, -1e100):
            accumulator.add(np.array([term]))
        assert accumulator.result()[0] == 2.0

    def test_empty_accumulator(self):
        assert WeightedAccumulator().result() is None


class TestIntegrateWeighted:

    def test_weighted_sum(self, quadrature):
        measure = DiscreteMeasure.from_atoms([(0.5, 0.25), (1.0, 0.5)])
        values = [StateVector.finite([1.0, 2.0]), StateVector.finite([4.0, 0.0])]
        result = quadrature.integrate_weighted(values, measure)
        np.testing.assert_allclose(result.samples, [2.25, 0.5])

    def test_empty_measure_gives_zero_state(self, quadrature):
        like = StateVector.finite([3.0, 4.0, 5.0])
        result = quadrature.integrate_weighted([], DiscreteMeasure.empty(), like=like)
        np.testing.assert_array_equal(result.samples, np.zeros(3))

    def test_empty_measure_without_template(self, quadrature):
        with pytest.raises(DimensionError):
            quadrature.integrate_weighted([], DiscreteMeasure.empty())

    def test_length_mismatch(self, quadrature):
        with pytest.raises(DimensionError):
            quadrature.integrate_weighted([StateVector.finite([1.0])], DiscreteMeasure.empty())

    def test_mixed_shapes(self, quadrature):
        measure = DiscreteMeasure.from_atoms([(0.5, 0.5), (1.0, 0.5)])
        with pytest.raises(ShapeError):
            quadrature.integrate_weighted([StateVector.finite([1.0]), StateVector.finite([1.0, 2.0])], measure)


class TestConvolution:

    def test_dirac_convolution(self, quadrature):
        result = quadrature.convolve(DiscreteMeasure.dirac(0.5, 0.5), DiscreteMeasure.dirac(1.0, 0.4), 1e-6)
        assert len(result) == 1
        assert result.locations[0] == pytest.approx(1.5)
        assert result.weights[0] == pytest.approx(0.2)

    def test_mass_is_multiplicative(self, quadrature):
        first = DiscreteMeasure.from_atoms([(0.1, 0.3), (0.4, 0.3), (1.0, 0.2)])
        second = DiscreteMeasure.from_atoms([(0.2, 0.5), (0.3, 0.25)])
        result = quadrature.convolve(first, second, 1e-3)
        assert result.mass == pytest.approx(first.mass * second.mass, rel=1e-14)

    def test_coinciding_sums_share_a_bin(self, quadrature):
        first = DiscreteMeasure.from_atoms([(0.0, 0.5), (1.0, 0.5)])
        result = quadrature.convolve(first, first, 1e-6)
        np.testing.assert_allclose(result.locations, [0.0, 1.0, 2.0])
        np.testing.assert_allclose(result.weights, [0.25, 0.5, 0.25])

    def test_empty_factor(self, quadrature):
        assert len(quadrature.convolve(DiscreteMeasure.empty(), DiscreteMeasure.dirac(1.0), 1e-6)) == 0

    def test_bin_width_must_be_positive(self, quadrature):
        with pytest.raises(DomainError):
            quadrature.convolve(DiscreteMeasure.dirac(1.0), DiscreteMeasure.dirac(1.0), 0.0)


class TestLaplaceTransform:

    def test_value(self, quadrature):
        measure = DiscreteMeasure.from_atoms([(0.0, 0.5), (2.0, 0.25)])
        assert quadrature.laplace_transform(measure, 1.0) == pytest.approx(0.5 + 0.25 * math.exp(-2.0))

    def test_mass_at_zero(self, quadrature):
        measure = DiscreteMeasure.from_atoms([(1.0, 0.5), (3.0, 0.25)])
        assert quadrature.laplace_transform(measure, 0.0) == pytest.approx(0.75)

    def test_empty(self, quadrature):
        assert quadrature.laplace_transform(DiscreteMeasure.empty(), 1.0) == 0.0

    def test_negative_argument(self, quadrature):
        with pytest.raises(DomainError):
            quadrature.laplace_transform(DiscreteMeasure.dirac(1.0), -1.0)

    def test_mass_above(self, quadrature):
        measure = DiscreteMeasure.from_atoms([(1.0, 0.5), (3.0, 0.25)])
        assert quadrature.mass_above(measure, 1.0) == pytest.approx(0.25)


class TestPanelRules:

    def test_uniform_panels(self, quadrature):
        nodes, weights = quadrature.panel_rule(0.0, 2.0, 4, 4)
        assert np.sum(weights * nodes ** 3) == pytest.approx(4.0, rel=1e-14)

    def test_logarithmic_panels(self, quadrature):
        nodes, weights = quadrature.panel_rule(1e-6, 1.0, 32, 16, Grading.LOGARITHMIC)
        assert np.sum(weights / np.sqrt(nodes)) == pytest.approx(2.0 - 2e-3, rel=1e-12)

    def test_logarithmic_needs_positive_lower_limit(self, quadrature):
        with pytest.raises(DomainError):
            quadrature.panel_rule(0.0, 1.0, 4, 4, Grading.LOGARITHMIC)

    def test_empty_interval(self, quadrature):
        with pytest.raises(DomainError):
            quadrature.panel_rule(1.0, 1.0, 4, 4)

    def test_origin_graded_rule(self, quadrature):
        nodes, weights = quadrature.origin_graded_rule(10.0, 16, 8, 1e-6)
        assert np.all((nodes > 0) & (nodes < 10.0))
        assert np.sum(weights) == pytest.approx(10.0, rel=1e-14)
        assert np.sum(weights * np.exp(-nodes)) == pytest.approx(1.0 - math.exp(-10.0), rel=1e-10)


class TestRefinement:

    def test_converges_on_smooth_integrand(self, quadrature):
        def evaluate(cfg):
            nodes, weights = quadrature.panel_rule(0.0, math.pi, cfg.panels, cfg.nodes_per_panel)
            return np.array([np.sum(weights * np.sin(nodes))])

        value = quadrature.refine_until_converged(evaluate, QuadratureConfig(panels=2, nodes_per_panel=8), 1e-10)
        assert value[0] == pytest.approx(2.0, rel=1e-12)

    def test_raises_when_levels_keep_moving(self, quadrature):
        with pytest.raises(ConvergenceError):
            quadrature.refine_until_converged(
                lambda cfg: np.array([float(cfg.panels)]), QuadratureConfig(panels=1, max_refinements=2), 1e-6
            )
