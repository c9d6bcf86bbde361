"""
抽象时滞方程 E ṗ(t) + K p(t) + M ṗ(t−τ) = r(t) 及其隐式 Euler 离散

    (E + τK) p^{n+1} = E pⁿ − M(pⁿ − p^{n−1}) + τ r^{n+1}
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
import scipy.sparse as sp

from ..errors import DimensionMismatchError
from ..model import AssembledSystem
from ..numerics import MatrixLike, extremal_eigenvalues, factorize_spd, is_symmetric
from .base import factor_symmetric

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DelayProblem:
    """
    时滞问题

    Attributes:
        E, K, M: 同一空间上的对称矩阵
        r: 右端项 r(t)
        p0: 初值
        p_history: t = −τ 处的历史值，默认取 p0（常数历史）
        p1: 给定时直接作为第一层，不再计算
    """

    E: MatrixLike
    K: MatrixLike
    M: MatrixLike
    r: Callable[[float], np.ndarray]
    p0: np.ndarray
    p_history: Optional[np.ndarray] = None
    p1: Optional[np.ndarray] = None

    def __post_init__(self):
        n = self.p0.shape[0]
        for name in ("E", "K", "M"):
            if getattr(self, name).shape != (n, n):
                raise DimensionMismatchError(f"{name} 的形状 {getattr(self, name).shape} 与初值长度 {n} 不一致")

    @property
    def history(self) -> np.ndarray:
        return self.p0 if self.p_history is None else self.p_history

    def is_symmetric(self) -> bool:
        return all(is_symmetric(m) for m in (self.E, self.K, self.M))

    def delay_condition(self) -> bool:
        """C_M ≤ c_E（谱范数意义下）"""
        c_e, _ = extremal_eigenvalues(self.E)
        m_low, m_high = extremal_eigenvalues(self.M)
        return max(abs(m_low), abs(m_high)) <= c_e * (1 + 1e-12)


@dataclass
class DelayTrajectory:
    tau: float
    times: List[float] = field(default_factory=list)
    values: List[np.ndarray] = field(default_factory=list)


class DelayEulerStepper:
    """时滞方程的隐式 Euler 步进器"""

    def __init__(self, problem: DelayProblem, tau: float):
        self.problem = problem
        self.tau = tau
        self._factor = factor_symmetric(problem.E + tau * problem.K, "E + τK")

    def step(self, p_n: np.ndarray, p_prev: np.ndarray, t_next: float) -> np.ndarray:
        pr = self.problem
        rhs = pr.E @ p_n - pr.M @ (p_n - p_prev) + self.tau * pr.r(t_next)
        return self._factor.solve(rhs)


def step_delay_euler(problem: DelayProblem, p_n: np.ndarray, p_prev: np.ndarray, t_next: float, tau: float) -> np.ndarray:
    """时滞 Euler 单步"""
    return DelayEulerStepper(problem, tau).step(p_n, p_prev, t_next)


def run_delay(problem: DelayProblem, tau: float, T: float) -> DelayTrajectory:
    """
    在 [0, T] 上推进时滞问题

    Args:
        problem: 时滞问题
        tau: 步长（同时是时滞）
        T: 终止时间
    """
    if not problem.delay_condition():
        logger.warning("C_M > c_E，一阶收敛没有保证")
    steps = int(round(T / tau))
    stepper = DelayEulerStepper(problem, tau)
    traj = DelayTrajectory(tau=tau, times=[0.0], values=[np.array(problem.p0, dtype=float)])
    previous, current = problem.history, traj.values[0]
    start = 0
    if problem.p1 is not None and steps >= 1:
        traj.times.append(tau)
        traj.values.append(np.array(problem.p1, dtype=float))
        previous, current = current, traj.values[-1]
        start = 1
    for n in range(start, steps):
        t_next = (n + 1) * tau
        nxt = stepper.step(current, previous, t_next)
        traj.times.append(t_next)
        traj.values.append(nxt)
        previous, current = current, nxt
    return traj


def reduce_to_delay_problem(
    system: AssembledSystem,
    p0: np.ndarray,
    theta0: np.ndarray,
    tau: float,
) -> DelayProblem:
    """
    把半解耦格式写成 (p, θ) 上的时滞问题

        E = [[C, −Ĉ], [−Ĉ, C̃]]，K = diag(B, B̃)，M = 𝔻A⁻¹𝔻ᵀ，
        r(t) = [g(t); h(t)] − 𝔻A⁻¹(f(t) − f(t−τ))/τ

    常数历史对应用相容的 u⁰ 启动半解耦格式。
    """
    coupling = system.block_coupling()
    a_factor = factorize_spd(system.A)
    a_inv_dt = a_factor.solve(coupling.T.toarray())
    M = sp.csr_matrix(coupling @ a_inv_dt)
    M = (0.5 * (M + M.T)).tocsr()

    def r(t: float) -> np.ndarray:
        df = system.f(t) - system.f(t - tau)
        correction = coupling @ a_factor.solve(df) / tau
        return np.concatenate([system.g(t), system.h(t)]) - correction

    return DelayProblem(
        E=system.block_mass(),
        K=system.block_diffusion(),
        M=M,
        r=r,
        p0=np.concatenate([p0, theta0]),
    )
