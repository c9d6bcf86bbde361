import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from pydantic import ValidationError

from thermoporo_splitting.errors import DivergedError, RangeError
from thermoporo_splitting.experiments import final_time_error
from thermoporo_splitting.model import ProblemData, constant_load
from thermoporo_splitting.problems import steady_state, toy_problem
from thermoporo_splitting.steppers import (
    SchemeConfig,
    SchemeId,
    StartupPolicy,
    create_stepper,
    get_available_schemes,
    initial_state,
    n_steps,
    run,
    step_hf_m_iterative,
    step_implicit_euler,
    step_implicit_midpoint,
)

ALL_SCHEMES = list(SchemeId)

TUNED = {
    SchemeId.SEMI_EXPLICIT_HALF_ITERATIVE: {"K": 3, "gamma": 0.8},
    SchemeId.SIGMA_SPLITTING: {"sigma": 0.8},
    SchemeId.HF_M_ITERATIVE: {"K": 3, "L_p": 0.5, "L_theta": 0.5},
    SchemeId.H_F_M_ITERATIVE: {"K": 3, "L_p": 0.5, "L_theta": 0.5},
    SchemeId.F_H_M_ITERATIVE: {"K": 3, "L_p": 0.5, "L_theta": 0.5},
}


def config_for(scheme: SchemeId, tau: float, **extra) -> SchemeConfig:
    options = dict(TUNED.get(scheme, {}))
    options.update(extra)
    return SchemeConfig(scheme=scheme, tau=tau, **options)


def max_difference(a, b) -> float:
    return float(np.abs(a.stacked() - b.stacked()).max())


@pytest.fixture
def steady_toy():
    system, _ = toy_problem(0.2, 2.0)
    f = constant_load(np.array([1.0, 0.0, -1.0]))
    g = constant_load(np.array([1.0]))
    h = constant_load(np.array([0.5]))
    u, p, theta = steady_state(system.with_loads(f, g, h))
    data = ProblemData(p0=p, theta0=theta, T=0.1, f=f, g=g, h=h)
    return system, data, np.concatenate([u, p, theta])


@pytest.mark.parametrize("scheme", ALL_SCHEMES)
def test_steady_state_is_preserved(steady_toy, scheme):
    system, data, expected = steady_toy
    traj = run(system, data, config_for(scheme, 0.001))
    assert traj.n_steps == 100
    assert not traj.diverged
    for state in traj.states:
        assert_allclose(state.stacked(), expected, atol=1e-9 * np.linalg.norm(expected))


def test_steady_state_on_fem_system(geothermal_small):
    system, _ = geothermal_small
    g = constant_load(np.linspace(1.0, 2.0, system.n_p))
    h = constant_load(np.full(system.n_theta, 0.1))
    u, p, theta = steady_state(system.with_loads(g=g, h=h))
    data = ProblemData(p0=p, theta0=theta, T=1.0, g=g, h=h)
    expected = np.concatenate([u, p, theta])
    for scheme in (SchemeId.IMPLICIT_EULER, SchemeId.SEMI_EXPLICIT_FULL, SchemeId.HF_M_ITERATIVE):
        final = run(system, data, config_for(scheme, 0.125)).final
        assert_allclose(final.stacked(), expected, atol=1e-9 * np.linalg.norm(expected))


class LinearInTime:
    """x(t) = a + t·b，载荷由方程反推"""

    def __init__(self, system):
        s = self.system = system
        self.u_a, self.u_b = np.array([0.3, -0.2, 0.1]), np.array([1.0, 0.5, -0.4])
        self.p_a, self.p_b = np.array([1.0]), np.array([2.0])
        self.th_a, self.th_b = np.array([-0.5]), np.array([0.7])
        self.g_rate = s.D @ self.u_b + s.C @ self.p_b - s.C_hat @ self.th_b
        self.h_rate = s.D_tilde @ self.u_b + s.C_tilde @ self.th_b - s.C_hat @ self.p_b

    def u(self, t):
        return self.u_a + t * self.u_b

    def p(self, t):
        return self.p_a + t * self.p_b

    def theta(self, t):
        return self.th_a + t * self.th_b

    def f(self, t):
        s = self.system
        return s.A @ self.u(t) - s.D.T @ self.p(t) - s.D_tilde.T @ self.theta(t)

    def g(self, t):
        return self.g_rate + self.system.B @ self.p(t)

    def h(self, t):
        return self.h_rate + self.system.B_tilde @ self.theta(t)

    def data(self, T):
        return ProblemData(p0=self.p(0.0), theta0=self.theta(0.0), T=T, f=self.f, g=self.g, h=self.h)


@pytest.mark.parametrize("scheme", [SchemeId.IMPLICIT_EULER, SchemeId.IMPLICIT_MIDPOINT])
def test_coupled_schemes_exact_for_linear_solutions(toy, scheme):
    system, _ = toy
    exact = LinearInTime(system)
    traj = run(system, exact.data(0.1), SchemeConfig(scheme=scheme, tau=0.0125))
    for t, state in zip(traj.times, traj.states):
        assert_allclose(state.u, exact.u(t), rtol=1e-10, atol=1e-12)
        assert_allclose(state.p, exact.p(t), rtol=1e-10)
        assert_allclose(state.theta, exact.theta(t), rtol=1e-10)


def test_single_step_helpers(toy):
    system, data = toy
    state = initial_state(system, data)
    euler = step_implicit_euler(system, state, 0.01, 0.01)
    midpoint = step_implicit_midpoint(system, state, 0.005, 0.01)
    traj = run(system, data, SchemeConfig(scheme=SchemeId.IMPLICIT_EULER, tau=0.01))
    assert max_difference(euler, traj.states[1]) <= 1e-14
    assert midpoint.is_finite()
    assert max_difference(euler, midpoint) <= 1e-2


def test_sigma_one_matches_full_decoupling(toy):
    system, data = toy
    tau = data.T / 64
    full = run(system, data, SchemeConfig(scheme=SchemeId.SEMI_EXPLICIT_FULL, tau=tau))
    sigma = run(system, data, SchemeConfig(scheme=SchemeId.SIGMA_SPLITTING, tau=tau, sigma=1.0))
    assert full.n_steps == sigma.n_steps == 64
    for a, b in zip(full.states, sigma.states):
        assert max_difference(a, b) <= 1e-10


def test_single_inner_iteration_matches_half_decoupling(toy):
    system, data = toy
    tau = data.T / 64
    half = run(system, data, SchemeConfig(scheme=SchemeId.SEMI_EXPLICIT_HALF, tau=tau))
    iterative = run(
        system, data, SchemeConfig(scheme=SchemeId.SEMI_EXPLICIT_HALF_ITERATIVE, tau=tau, K=1, gamma=0.5)
    )
    for a, b in zip(half.states, iterative.states):
        assert max_difference(a, b) <= 1e-14


@pytest.mark.parametrize("scheme", [SchemeId.HF_M_ITERATIVE, SchemeId.H_F_M_ITERATIVE, SchemeId.F_H_M_ITERATIVE])
def test_inner_iterations_converge_to_implicit_euler(toy, scheme):
    system, data = toy
    euler = run(system, data, SchemeConfig(scheme=SchemeId.IMPLICIT_EULER, tau=0.01))
    iterative = run(system, data, SchemeConfig(scheme=scheme, tau=0.01, K=60, L_p=1.0, L_theta=1.0))
    for a, b in zip(euler.states, iterative.states):
        assert max_difference(a, b) <= 1e-10


def test_inner_increments_shrink(toy):
    system, data = toy
    state = initial_state(system, data)
    _, increments = step_hf_m_iterative(system, state, 0.01, 0.01, 1.0, 1.0, 10)
    assert len(increments) == 10
    assert all(b < a for a, b in zip(increments[1:], increments[2:]))


def test_hf_m_matches_implicit_euler_on_geothermal(geothermal):
    system, data = geothermal
    euler = run(system, data, SchemeConfig(scheme=SchemeId.IMPLICIT_EULER, tau=0.125)).final
    traj = run(
        system, data, SchemeConfig(scheme=SchemeId.HF_M_ITERATIVE, tau=0.125, K=200, L_p=0.025, L_theta=0.025)
    )
    assert final_time_error(euler, traj.final, system).e_T <= 1e-8


@settings(max_examples=20, deadline=None)
@given(
    scheme=st.sampled_from(ALL_SCHEMES),
    factor=st.floats(min_value=-5.0, max_value=5.0, allow_nan=False),
)
def test_zero_load_runs_are_linear(scheme, factor):
    system, data = toy_problem(0.3, 1.5)
    scaled = ProblemData(p0=factor * data.p0, theta0=factor * data.theta0, T=data.T)
    config = config_for(scheme, 0.01)
    base = run(system, data, config).final
    result = run(system, scaled, config).final
    assert_allclose(result.stacked(), factor * base.stacked(), rtol=1e-9, atol=1e-12)


def test_divergence_is_flagged():
    system, data = toy_problem(0.62, 0.656)
    traj = run(system, data, SchemeConfig(scheme=SchemeId.SEMI_EXPLICIT_FULL, tau=0.1 * 2**-8))
    assert traj.diverged
    assert 1 <= traj.diverged_step < 256
    assert traj.n_steps == traj.diverged_step
    with pytest.raises(DivergedError) as info:
        traj.raise_if_diverged()
    assert info.value.step == traj.diverged_step


def test_two_step_startup(toy):
    system, data = toy
    tau = 0.01
    config = SchemeConfig(
        scheme=SchemeId.SEMI_EXPLICIT_FULL, tau=tau, startup=StartupPolicy.IMPLICIT_EULER_STEP
    )
    traj = run(system, data, config)
    euler = step_implicit_euler(system, initial_state(system, data), tau, tau)
    assert max_difference(traj.states[1], euler) <= 1e-14
    default = run(system, data, SchemeConfig(scheme=SchemeId.SEMI_EXPLICIT_FULL, tau=tau))
    assert max_difference(default.states[1], euler) > 0


def test_step_count():
    assert n_steps(0.125, 1.0) == 8
    assert n_steps(0.1 * 2**-8, 0.1) == 256
    with pytest.raises(RangeError):
        n_steps(0.3, 1.0)
    with pytest.raises(RangeError):
        n_steps(2.0, 1.0)
    with pytest.raises(RangeError):
        n_steps(-0.1, 1.0)


@pytest.mark.parametrize(
    "options",
    [
        {"tau": 0.0},
        {"tau": 0.1, "gamma": 1.5},
        {"tau": 0.1, "K": 0},
        {"tau": 0.1, "L_p": -1.0},
        {"tau": 0.5, "T": 0.1},
        {"tau": 0.1, "unknown": 1},
    ],
)
def test_scheme_config_rejects(options):
    with pytest.raises(ValidationError):
        SchemeConfig(scheme=SchemeId.IMPLICIT_EULER, **options)


@pytest.mark.parametrize("scheme", ALL_SCHEMES)
def test_create_stepper(toy, scheme):
    system, _ = toy
    stepper = create_stepper(SchemeConfig(scheme=scheme, tau=0.01), system)
    assert stepper.scheme == scheme
    info = stepper.get_info()
    assert info["scheme"] == scheme.value
    assert info["two_step"] == (scheme in (SchemeId.SEMI_EXPLICIT_FULL, SchemeId.SIGMA_SPLITTING))


def test_available_schemes():
    schemes = get_available_schemes()
    assert set(schemes) == {s.value for s in SchemeId}
    assert all(schemes.values())


@pytest.mark.parametrize(
    "scheme",
    [SchemeId.SEMI_EXPLICIT_HALF, SchemeId.SEMI_EXPLICIT_HALF_ITERATIVE, SchemeId.HF_M_ITERATIVE],
)
def test_toy_pressure_temperature_block_schemes_run(scheme):
    system, data = toy_problem(0.2, 2.0)
    traj = run(system, data, config_for(scheme, 0.01))
    assert not traj.diverged
    assert traj.n_steps == 10
    assert np.all(np.isfinite(traj.final.p)) and np.all(np.isfinite(traj.final.theta))


def test_toy_block_operators_are_sparse(toy):
    system, _ = toy
    assert system.block_mass().shape == (2, 2)
    assert system.block_diffusion().toarray().tolist() == [[2.0, 0.0], [0.0, 1.0]]
    assert system.block_coupling().shape == (2, 3)
