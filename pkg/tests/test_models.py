import math

import numpy as np
import pytest
from pydantic import ValidationError

from models.bernstein import LevyMeasureKind, LevyMeasureSpec, LevyTriplet
from models.calculus import GeneratorReport, SubordinationPlan
from models.measure import DiscreteMeasure, Grading, QuadratureConfig
from models.run_config import Command, RunConfig
from models.semigroup import SemigroupSpec, StateKind, StateVector
from models.subordinator import ContourConfig, FamilyKind, SubordinatorFamily
from utils.settings import Settings


class TestDiscreteMeasure:

    def test_mass_and_atoms(self):
        measure = DiscreteMeasure.from_atoms([(0.5, 0.25), (2.0, 0.5)])
        assert measure.mass == pytest.approx(0.75)
        assert measure.atoms == [(0.5, 0.25), (2.0, 0.5)]
        assert len(measure) == 2
        assert measure.is_sub_probability()

    def test_empty_measure(self):
        measure = DiscreteMeasure.from_atoms([])
        assert len(measure) == 0
        assert measure.mass == 0.0

    def test_scaled_keeps_locations(self):
        measure = DiscreteMeasure.dirac(1.5, 0.8).scaled(0.5)
        assert measure.atoms == [(1.5, 0.4)]

    @pytest.mark.parametrize('locations,weights', [
        ([-1.0, 2.0], [0.5, 0.5]),   # negative location
        ([1.0, 2.0], [0.5, -0.1]),   # negative weight
        ([2.0, 1.0], [0.5, 0.5]),    # unsorted
        ([1.0, 1.0], [0.5, 0.5]),    # repeated location
        ([1.0], [0.5, 0.5]),         # length mismatch
        ([math.inf], [1.0]),         # non-finite
    ])
    def test_rejects_invalid_atoms(self, locations, weights):
        with pytest.raises(ValidationError):
            DiscreteMeasure(locations=locations, weights=weights)

    def test_arrays_are_read_only(self):
        measure = DiscreteMeasure.dirac(1.0)
        with pytest.raises(ValueError):
            measure.weights[0] = 2.0

    def test_over_unit_mass_is_not_sub_probability(self):
        assert not DiscreteMeasure.from_atoms([(0.0, 0.6), (1.0, 0.6)]).is_sub_probability()


class TestQuadratureConfig:

    def test_defaults_come_from_settings(self):
        cfg = QuadratureConfig()
        assert cfg.panels == 64
        assert cfg.nodes_per_panel == 16
        assert cfg.grading == Grading.LOGARITHMIC

    def test_refined_doubles_panels(self):
        cfg = QuadratureConfig(panels=8)
        assert cfg.refined(2).panels == 32
        assert cfg.refined(2).nodes_per_panel == cfg.nodes_per_panel

    def test_rejects_single_node(self):
        with pytest.raises(ValidationError):
            QuadratureConfig(nodes_per_panel=1)


class TestLevyTriplet:

    def test_default_triplet_is_zero(self):
        f = LevyTriplet()
        assert f.a == 0.0 and f.b == 0.0
        assert f.measure.kind == LevyMeasureKind.ZERO

    def test_power_measure_stability_index(self):
        assert LevyMeasureSpec.power(c=1.0, exponent=-1.3).stability_index == pytest.approx(0.3)

    @pytest.mark.parametrize('exponent', [-1.0, -2.0, -0.5, -2.5])
    def test_power_exponent_must_give_levy_measure(self, exponent):
        with pytest.raises(ValidationError):
            LevyMeasureSpec.power(c=1.0, exponent=exponent)

    def test_atomic_measure_excludes_origin(self):
        with pytest.raises(ValidationError):
            LevyMeasureSpec.atomic(DiscreteMeasure.dirac(0.0))

    def test_negative_drift_rejected(self):
        with pytest.raises(ValidationError):
            LevyTriplet(b=-1.0)


class TestSubordinatorFamily:

    def test_killing_rates(self):
        assert SubordinatorFamily.stable(0.5).killing_rate == 0.0
        assert SubordinatorFamily.killed_stable(0.3, 0.5).killing_rate == 0.3
        assert SubordinatorFamily.drift_killing(a=0.2, b=1.0).killing_rate == 0.2

    def test_density_availability(self):
        assert SubordinatorFamily.stable(0.5).has_density
        assert not SubordinatorFamily.drift_killing(b=1.0).has_density

    @pytest.mark.parametrize('alpha', [0.0, 1.0, 1.5, None])
    def test_stable_index_range(self, alpha):
        with pytest.raises(ValidationError):
            SubordinatorFamily(kind=FamilyKind.STABLE, alpha=alpha)

    def test_plain_stable_takes_no_killing(self):
        with pytest.raises(ValidationError):
            SubordinatorFamily(kind=FamilyKind.STABLE, alpha=0.5, a=0.1)

    @pytest.mark.parametrize('theta', [math.pi / 3.0, math.pi / 2.0, math.pi])
    def test_contour_angle_range(self, theta):
        with pytest.raises(ValidationError):
            ContourConfig(theta=theta)


class TestStateVector:

    def test_finite_state(self):
        x = StateVector.finite([1.0, 2.0])
        assert x.kind == StateKind.FINITE
        assert not x.is_grid

    def test_grid_needs_spacing(self):
        with pytest.raises(ValidationError):
            StateVector(kind=StateKind.GRID1D, samples=[1.0, 2.0])

    def test_grid2d_needs_2d_samples(self):
        with pytest.raises(ValidationError):
            StateVector.grid2d([1.0, 2.0], spacing=0.1)

    def test_with_samples_keeps_metadata(self):
        x = StateVector.grid1d([0.0, 1.0, 2.0], spacing=0.5, origin=-1.0)
        y = x.with_samples(np.zeros(3))
        assert y.spacing == 0.5
        assert y.origin == (-1.0,)
        np.testing.assert_allclose(y.axis_coordinates(), [-1.0, -0.5, 0.0])


class TestSemigroupSpec:

    def test_eigendecomposition(self):
        T = SemigroupSpec.from_matrix([[2.0, -1.0], [-1.0, 2.0]])
        np.testing.assert_allclose(T.eigenvalues, [1.0, 3.0])
        assert T.size == 2

    def test_rejects_asymmetric_generator(self):
        with pytest.raises(ValidationError):
            SemigroupSpec.from_matrix([[1.0, 0.5], [0.0, 1.0]])

    def test_rejects_indefinite_generator(self):
        with pytest.raises(ValueError):
            SemigroupSpec.from_matrix(np.diag([1.0, -1.0]))

    def test_heat_dimension(self):
        with pytest.raises(ValidationError):
            SemigroupSpec.heat(3)


class TestReports:

    def test_generator_report_needs_decreasing_steps(self):
        with pytest.raises(ValidationError):
            GeneratorReport(h_values=[0.1, 0.2], errors=[1.0, 2.0], estimated_order=1.0)

    def test_plan_defaults(self):
        plan = SubordinationPlan(family=SubordinatorFamily.stable(0.5))
        assert plan.epsilon_tail == pytest.approx(1e-7)
        assert plan.n_atoms == 3000


class TestRunConfig:

    def test_bernstein_eval_needs_a_function(self):
        with pytest.raises(ValidationError):
            RunConfig(command=Command.BERNSTEIN_EVAL, lambdas=[1.0])

    def test_density_needs_positive_time(self):
        with pytest.raises(ValidationError) as raised:
            RunConfig(command=Command.DENSITY, alpha=0.5, t=0.0, s_values=[1.0])
        assert raised.value.errors()[0]['type'] == 'out_of_range'

    def test_missing_density_time_is_a_value_error(self):
        with pytest.raises(ValidationError) as raised:
            RunConfig(command=Command.DENSITY, alpha=0.5, s_values=[1.0])
        assert raised.value.errors()[0]['type'] == 'value_error'

    def test_matrix_semigroup_needs_files(self):
        with pytest.raises(ValidationError):
            RunConfig(command=Command.SUBORDINATE, alpha=0.5, t=1.0, semigroup='matrix')

    def test_valid_subordinate(self):
        config = RunConfig(command=Command.SUBORDINATE, alpha=0.5, t=1.0, semigroup='heat1d', input='x.csv')
        assert config.input.name == 'x.csv'

    def test_alpha_range(self):
        with pytest.raises(ValidationError):
            RunConfig(command=Command.BERNSTEIN_EVAL, alpha=1.0, lambdas=[1.0])


class TestSettings:

    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv('SUBFN_DEFAULT_ATOMS', '500')
        monkeypatch.setenv('SUBFN_THREADS', '2')
        loaded = Settings()
        assert loaded.default_atoms == 500
        assert loaded.threads == 2

    def test_invalid_override_rejected(self, monkeypatch):
        monkeypatch.setenv('SUBFN_DEFAULT_TAIL', '0.5')
        with pytest.raises(ValidationError):
            Settings()
