import math

import numpy as np
import pytest

from models.semigroup import ExtensionPolicy, SemigroupSpec, StateVector
from services.semigroup_service import SemigroupService
from utils.errors import DomainError, ShapeError


@pytest.fixture
def semigroups():
    return SemigroupService()


def lattice_symbol_of_cosine(h: float) -> float:
    """Eigenvalue of minus the 3-point Laplacian on cos(x)"""
    return 4.0 * math.sin(h / 2.0) ** 2 / h ** 2


class TestMatrixSemigroup:

    def test_diagonal_action(self, semigroups, diagonal_semigroup):
        x = StateVector.finite([1.0, 1.0])
        result = semigroups.apply(diagonal_semigroup, 0.3, x)
        np.testing.assert_allclose(result.samples, [math.exp(-0.3), math.exp(-1.2)], rtol=1e-14)

    def test_time_zero_is_identity(self, semigroups, dirichlet_semigroup, unit_vector):
        assert semigroups.apply(dirichlet_semigroup, 0.0, unit_vector) is unit_vector

    def test_semigroup_law(self, semigroups, dirichlet_semigroup, unit_vector):
        twice = semigroups.apply(dirichlet_semigroup, 0.4, semigroups.apply(dirichlet_semigroup, 0.3, unit_vector))
        once = semigroups.apply(dirichlet_semigroup, 0.7, unit_vector)
        np.testing.assert_allclose(twice.samples, once.samples, atol=1e-10)

    def test_increment_without_cancellation(self, semigroups, diagonal_semigroup):
        x = StateVector.finite([1.0, 1.0])
        result = semigroups.increment_apply(diagonal_semigroup, 1e-12, x)
        np.testing.assert_allclose(result.samples, [1e-12, 4e-12], rtol=1e-9)

    def test_apply_many_rows(self, semigroups, dirichlet_semigroup, unit_vector):
        times = np.array([0.0, 0.5, 2.0])
        stacked = semigroups.apply_many(dirichlet_semigroup, times, unit_vector)
        for row, t in zip(stacked, times):
            np.testing.assert_allclose(row, semigroups.apply(dirichlet_semigroup, t, unit_vector).samples,
                                       atol=1e-14)

    def test_generator_consistency_is_first_order(self, semigroups, dirichlet_semigroup, unit_vector):
        generator = semigroups.generator_apply(dirichlet_semigroup, unit_vector).samples

        def error(h: float) -> float:
            quotient = (unit_vector.samples - semigroups.apply(dirichlet_semigroup, h, unit_vector).samples) / h
            return float(np.max(np.abs(quotient - generator)))

        assert 0.35 <= error(0.005) / error(0.01) <= 0.65

    def test_strong_continuity(self, semigroups, dirichlet_semigroup, unit_vector):
        distances = [
            semigroups.sup_norm(unit_vector.with_samples(
                semigroups.apply(dirichlet_semigroup, t, unit_vector).samples - unit_vector.samples
            ))
            for t in (1e-1, 1e-2, 1e-3)
        ]
        assert distances[0] > distances[1] > distances[2]

    def test_generator_is_the_matrix(self, semigroups, diagonal_semigroup):
        result = semigroups.generator_apply(diagonal_semigroup, StateVector.finite([1.0, 1.0]))
        np.testing.assert_array_equal(result.samples, [1.0, 4.0])

    def test_spectral_apply(self, semigroups, diagonal_semigroup):
        result = semigroups.spectral_apply(diagonal_semigroup, np.sqrt, StateVector.finite([1.0, 1.0]))
        np.testing.assert_allclose(result.samples, [1.0, 2.0], rtol=1e-14)

    def test_size_mismatch(self, semigroups, diagonal_semigroup):
        with pytest.raises(ShapeError):
            semigroups.apply(diagonal_semigroup, 1.0, StateVector.finite([1.0, 2.0, 3.0]))

    def test_negative_time(self, semigroups, diagonal_semigroup):
        with pytest.raises(DomainError):
            semigroups.apply(diagonal_semigroup, -1.0, StateVector.finite([1.0, 1.0]))

    def test_dirichlet_laplacian(self, semigroups):
        np.testing.assert_array_equal(
            semigroups.dirichlet_laplacian(3),
            [[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]]
        )


class TestHeatSemigroup:

    def test_cosine_decays_with_kernel(self, semigroups, heat1d, cosine_grid):
        result = semigroups.apply(heat1d, 0.5, cosine_grid)
        np.testing.assert_allclose(result.samples, math.exp(-0.5) * cosine_grid.samples, atol=1e-7)

    def test_cosine_decays_on_lattice(self, semigroups, heat1d, cosine_grid):
        t = 1e-5
        decay = math.exp(-t * lattice_symbol_of_cosine(cosine_grid.spacing))
        result = semigroups.apply(heat1d, t, cosine_grid)
        np.testing.assert_allclose(result.samples, decay * cosine_grid.samples, atol=1e-13)

    def test_gaussian_peak(self, semigroups, heat1d, gaussian_grid):
        # exp(-x**2/4) spreads to exp(-x**2/8)/sqrt(2) at t = 1
        result = semigroups.apply(heat1d, 1.0, gaussian_grid)
        peak = result.samples[np.argmin(np.abs(gaussian_grid.axis_coordinates()))]
        assert peak == pytest.approx(0.707107, abs=1e-4)

    def test_wide_kernel_on_edges(self, semigroups, heat1d):
        x = semigroups.edge_grid(lambda x: np.exp(-x ** 2 / 4.0), lower=-2.0, upper=2.0, h=0.1)
        result = semigroups.apply(heat1d, 50.0, x)
        assert np.ptp(result.samples) < 1e-2
        assert np.min(x.samples) <= result.samples[0] <= np.max(x.samples)

    @pytest.mark.parametrize('t', [1e-6, 1e-3, 0.5, 10.0])
    def test_constants_preserved(self, semigroups, heat1d, t):
        for extension in ExtensionPolicy:
            x = StateVector.grid1d(np.full(64, 3.0), spacing=0.1, extension=extension)
            np.testing.assert_allclose(semigroups.apply(heat1d, t, x).samples, 3.0, rtol=1e-12)

    @pytest.mark.parametrize('t', [1e-5, 0.5])
    def test_contractive_and_positive(self, semigroups, heat1d, t):
        rng = np.random.default_rng(7)
        for extension in ExtensionPolicy:
            x = StateVector.grid1d(rng.uniform(0.0, 1.0, 200), spacing=0.05, extension=extension)
            result = semigroups.apply(heat1d, t, x)
            assert semigroups.sup_norm(result) <= semigroups.sup_norm(x) * (1.0 + 1e-12)
            assert np.min(result.samples) >= -1e-12

    @pytest.mark.parametrize('fixture', ['cosine_grid', 'gaussian_grid'])
    def test_strong_continuity(self, semigroups, heat1d, fixture, request):
        x = request.getfixturevalue(fixture)
        distances = [
            semigroups.sup_norm(x.with_samples(semigroups.apply(heat1d, t, x).samples - x.samples))
            for t in (1e-1, 1e-2, 1e-3)
        ]
        assert distances[0] > distances[1] > distances[2]
        assert distances[2] <= 0.05 * distances[0]

    def test_semigroup_law(self, semigroups, heat1d, cosine_grid):
        twice = semigroups.apply(heat1d, 0.2, semigroups.apply(heat1d, 0.3, cosine_grid))
        once = semigroups.apply(heat1d, 0.5, cosine_grid)
        np.testing.assert_allclose(twice.samples, once.samples, atol=1e-7)

    def test_lattice_semigroup_law_on_edges(self, semigroups, heat1d, gaussian_grid):
        twice = semigroups.apply(heat1d, 2e-4, semigroups.apply(heat1d, 3e-4, gaussian_grid))
        once = semigroups.apply(heat1d, 5e-4, gaussian_grid)
        np.testing.assert_allclose(twice.samples, once.samples, atol=1e-12)

    def test_increment_matches_apply(self, semigroups, heat1d, gaussian_grid):
        for t in (1e-6, 0.1):
            increment = semigroups.increment_apply(heat1d, t, gaussian_grid)
            applied = semigroups.apply(heat1d, t, gaussian_grid)
            np.testing.assert_allclose(increment.samples + applied.samples, gaussian_grid.samples, atol=1e-13)

    def test_short_time_generator(self, semigroups, heat1d, gaussian_grid):
        h = 1e-6
        quotient = semigroups.increment_apply(heat1d, h, gaussian_grid).samples / h
        generator = semigroups.generator_apply(heat1d, gaussian_grid).samples
        np.testing.assert_allclose(quotient, generator, atol=1e-6)

    def test_generator_on_cosine(self, semigroups, heat1d, cosine_grid):
        result = semigroups.generator_apply(heat1d, cosine_grid)
        expected = lattice_symbol_of_cosine(cosine_grid.spacing) * cosine_grid.samples
        np.testing.assert_allclose(result.samples, expected, atol=1e-9)

    def test_two_dimensions(self, semigroups, cosine_grid2d):
        heat2d = SemigroupSpec.heat(2)
        result = semigroups.apply(heat2d, 0.25, cosine_grid2d)
        np.testing.assert_allclose(result.samples, math.exp(-0.5) * cosine_grid2d.samples, atol=1e-7)

        t = 1e-5
        decay = math.exp(-2.0 * t * lattice_symbol_of_cosine(cosine_grid2d.spacing))
        np.testing.assert_allclose(semigroups.apply(heat2d, t, cosine_grid2d).samples,
                                   decay * cosine_grid2d.samples, atol=1e-13)

    def test_dimension_mismatch(self, semigroups, heat1d, cosine_grid2d):
        with pytest.raises(ShapeError):
            semigroups.apply(heat1d, 1.0, cosine_grid2d)

    def test_heat_needs_grid_state(self, semigroups, heat1d):
        with pytest.raises(ShapeError):
            semigroups.apply(heat1d, 1.0, StateVector.finite([1.0, 2.0]))

    def test_spectral_apply_needs_matrix(self, semigroups, heat1d, cosine_grid):
        with pytest.raises(ShapeError):
            semigroups.spectral_apply(heat1d, np.sqrt, cosine_grid)


class TestDiscreteLaplacian:

    def test_edge_extension_annihilates_constants(self, semigroups):
        x = StateVector.grid1d(np.full(10, 2.0), spacing=0.5)
        np.testing.assert_array_equal(semigroups.discrete_laplacian(x), np.zeros(10))

    def test_quadratic(self, semigroups):
        x = StateVector.grid1d(np.arange(6.0) ** 2, spacing=1.0, extension=ExtensionPolicy.CONSTANT_EDGE)
        laplacian = semigroups.discrete_laplacian(x)
        np.testing.assert_allclose(laplacian[1:-1], 2.0)
        assert laplacian[0] == pytest.approx(1.0)  # edge copy: 0 - 0 + 1

    def test_finite_state_rejected(self, semigroups):
        with pytest.raises(ShapeError):
            semigroups.discrete_laplacian(StateVector.finite([1.0, 2.0]))
