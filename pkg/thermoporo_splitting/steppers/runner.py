"""
在 [0, T] 上驱动任意格式
"""

import logging
from typing import Optional

from ..errors import RangeError
from ..model import AssembledSystem, ProblemData
from ..problems import consistent_u0
from ..utils.logging import log_performance
from ..utils.validation import validate_step_size
from .base import SchemeConfig, SchemeId, StartupPolicy, State, Trajectory
from .coupled import ImplicitEulerStepper

logger = logging.getLogger(__name__)

DIVERGENCE_FACTOR = 1e12


def n_steps(tau: float, T: float) -> int:
    """T/τ，要求整除"""
    ok, error = validate_step_size(tau, T)
    if not ok:
        raise RangeError(error, token=str(tau))
    return int(round(T / tau))


def initial_state(system: AssembledSystem, data: ProblemData) -> State:
    """(u⁰, p⁰, θ⁰)，u⁰ 由平衡方程确定"""
    u0 = consistent_u0(system, data.p0, data.theta0, 0.0)
    return State(u0, data.p0.copy(), data.theta0.copy())


@log_performance
def run(system: AssembledSystem, data: ProblemData, config: SchemeConfig, stepper=None) -> Trajectory:
    """
    推进 N = T/τ 步

    Args:
        system: 装配后的系统
        data: 初值与终止时间（config.T 给定时优先）
        config: 格式配置
        stepper: 可复用的步进器（必须与 system、config 对应）

    Returns:
        Trajectory: 发散时提前结束并标记 diverged
    """
    from . import create_stepper

    system = data.apply_loads(system)
    data.check(system)
    T = config.T if config.T is not None else data.T
    steps = n_steps(config.tau, T)
    stepper = stepper or create_stepper(config, system)

    state = initial_state(system, data)
    traj = Trajectory(scheme=config.scheme.value, tau=config.tau)
    traj.append(0.0, state)
    scale = state.norm() or 1.0
    limit = DIVERGENCE_FACTOR * scale

    previous: Optional[State] = state if stepper.two_step else None
    start = 0
    if stepper.two_step and config.startup == StartupPolicy.IMPLICIT_EULER_STEP and steps >= 1:
        euler = ImplicitEulerStepper(system, config.model_copy(update={"scheme": SchemeId.IMPLICIT_EULER}))
        result = euler.step(state, config.tau)
        traj.append(config.tau, result.state, result.residuals)
        previous, state = state, result.state
        start = 1

    for n in range(start, steps):
        t_next = (n + 1) * config.tau
        result = stepper.step(state, t_next, previous)
        nxt = result.state
        traj.append(t_next, nxt, result.residuals)
        if not nxt.is_finite() or nxt.norm() > limit:
            traj.diverged = True
            traj.diverged_step = n + 1
            logger.warning(f"{config.scheme.value} 在第 {n + 1} 步发散 (τ={config.tau})")
            break
        if stepper.two_step:
            previous = state
        state = nxt

    return traj
