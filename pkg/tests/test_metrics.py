import math

import numpy as np
import pytest
import scipy.sparse as sp
from numpy.testing import assert_allclose

from thermoporo_splitting.errors import (
    DimensionMismatchError,
    NegativeQuadraticFormError,
    ZeroReferenceError,
)
from thermoporo_splitting.experiments import energy_norm, final_time_error, fit_slope, prolong
from thermoporo_splitting.problems import geothermal_problem
from thermoporo_splitting.steppers import State, initial_state


class TestEnergyNorm:
    def test_identity(self):
        assert energy_norm(np.eye(2), [3.0, 4.0]) == pytest.approx(5.0)

    def test_sparse(self):
        assert energy_norm(sp.diags([4.0, 9.0], format="csr"), [1.0, 1.0]) == pytest.approx(math.sqrt(13.0))

    def test_negative_form(self):
        with pytest.raises(NegativeQuadraticFormError):
            energy_norm(np.diag([1.0, -4.0]), [0.0, 1.0])

    def test_semidefinite_allowed(self):
        assert energy_norm(np.diag([1.0, 0.0]), [0.0, 1.0]) == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            energy_norm(np.eye(3), [1.0, 2.0])


class TestFinalTimeError:
    def test_identical_states(self, geothermal_small):
        system, data = geothermal_small
        state = initial_state(system, data)
        report = final_time_error(state, state, system, tau=0.5, scheme="implicit_euler")
        assert report.e_T == 0.0
        assert report.h == pytest.approx(0.25)
        assert report.scheme == "implicit_euler"

    def test_components_add_up(self, toy):
        system, data = toy
        ref = initial_state(system, data)
        approx = State(ref.u, 1.1 * ref.p, ref.theta)
        report = final_time_error(ref, approx, system)
        assert report.e_u == 0.0
        assert report.e_p == pytest.approx(0.1)
        assert report.e_T == pytest.approx(report.e_u + report.e_p + report.e_theta)
        assert math.isnan(report.h)

    def test_zero_reference(self, toy):
        system, data = toy
        ref = initial_state(system, data)
        zero_p = State(ref.u, np.zeros_like(ref.p), ref.theta)
        with pytest.raises(ZeroReferenceError):
            final_time_error(zero_p, ref, system)


class TestFitSlope:
    def test_exact_power_law(self):
        taus = [0.1, 0.05, 0.025, 0.0125]
        assert fit_slope(taus, [3.0 * t**2 for t in taus]) == pytest.approx(2.0)

    def test_drops_large_and_invalid_errors(self):
        taus = [0.4, 0.2, 0.1, 0.05, 0.025]
        errors = [math.inf, 0.9, 0.1, 0.05, 0.025]
        assert fit_slope(taus, errors) == pytest.approx(1.0)

    def test_too_few_points(self):
        assert fit_slope([0.1, 0.05], [0.01, math.nan]) is None
        assert fit_slope([0.1], [0.01]) is None


class TestProlong:
    def test_same_mesh_is_identity(self, geothermal_small):
        system, data = geothermal_small
        state = initial_state(system, data)
        moved = prolong(state, system, system)
        assert_allclose(moved.stacked(), state.stacked(), atol=1e-14)

    def test_linear_field_on_nested_meshes(self):
        coarse, _ = geothermal_problem(n=2)
        fine, _ = geothermal_problem(n=4)
        bubble = lambda x, y: x * (1 - x) * y * (1 - y)
        p_coarse = coarse.p_space.restrict(coarse.p_space.interpolate(bubble))
        state = State(np.zeros(coarse.n_u), p_coarse, p_coarse)
        moved = prolong(state, coarse, fine)
        assert moved.p.shape == (fine.n_p,)
        assert moved.u.shape == (fine.n_u,)
        # n=2 上唯一的内部节点 (1/2, 1/2)
        center = np.flatnonzero(np.all(np.isclose(fine.p_space.dof_coords[fine.p_space.scalar_interior], 0.5), axis=1))
        assert moved.p[center[0]] == pytest.approx(p_coarse[0])

    def test_requires_fem_systems(self, toy, geothermal_small):
        system, data = toy
        with pytest.raises(DimensionMismatchError):
            prolong(initial_state(system, data), system, geothermal_small[0])
