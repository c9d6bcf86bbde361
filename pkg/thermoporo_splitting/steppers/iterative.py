"""
迭代耦合格式（每个时间步 K 次内迭代，内初值 x^{n+1,0} = xⁿ）

- hf_m: (p, θ) 耦合求解后求 u
- h_f_m: θ → p → u
- f_h_m: p → θ → u

稳定化项 L_p·M、L_θ·M 中的 M 是未缩放的 P1 质量矩阵。内映射的不动点就是隐式 Euler 步。
"""

import logging
from abc import abstractmethod
from typing import Optional, Tuple

import numpy as np

from ..model import AssembledSystem
from ..numerics import block_matrix, factorize_spd
from .base import SchemeConfig, SchemeId, State, StepResult, Stepper, factor_symmetric

logger = logging.getLogger(__name__)


def _energy(factor_matrix, v: np.ndarray) -> float:
    return float(np.sqrt(max(v @ (factor_matrix @ v), 0.0)))


class _InnerIterationStepper(Stepper):
    """内迭代基类：子类实现一次 (p, θ) 更新"""

    def __init__(self, system: AssembledSystem, config: SchemeConfig):
        super().__init__(system, config)
        s, tau = system, self.tau
        self.K = config.K
        self.L_p = config.L_p
        self.L_theta = config.L_theta
        self.P = s.C + config.L_p * s.mass + tau * s.B
        self.T = s.C_tilde + config.L_theta * s.mass + tau * s.B_tilde
        self._a_factor = factorize_spd(s.A)

    def _base_rhs(self, current: State, t_next: float) -> Tuple[np.ndarray, np.ndarray]:
        """与内迭代无关的右端项部分"""
        s, tau = self.system, self.tau
        u, p, th = current.u, current.p, current.theta
        rhs_p = s.D @ u + s.C @ p - s.C_hat @ th + tau * s.g(t_next)
        rhs_th = s.D_tilde @ u - s.C_hat @ p + s.C_tilde @ th + tau * s.h(t_next)
        return rhs_p, rhs_th

    @abstractmethod
    def _sweep(self, u_k, p_k, th_k, base_p, base_th) -> Tuple[np.ndarray, np.ndarray]:
        """返回 (p^{k+1}, θ^{k+1})"""

    def _increment(self, dp: np.ndarray, dth: np.ndarray) -> float:
        return float(np.hypot(_energy(self.P, dp), _energy(self.T, dth)))

    def step(self, current: State, t_next: float, previous: Optional[State] = None) -> StepResult:
        s = self.system
        base_p, base_th = self._base_rhs(current, t_next)
        f_next = s.f(t_next)
        u_k, p_k, th_k = current.u, current.p, current.theta
        increments = []
        for _ in range(self.K):
            p_new, th_new = self._sweep(u_k, p_k, th_k, base_p, base_th)
            u_k = self._a_factor.solve(f_next + s.D.T @ p_new + s.D_tilde.T @ th_new)
            increments.append(self._increment(p_new - p_k, th_new - th_k))
            p_k, th_k = p_new, th_new
        logger.debug(f"{self.scheme.value}: {self.K} 次内迭代，末次增量 {increments[-1]:.3e}")
        return StepResult(State(u_k, p_k, th_k), increments)


class HfMIterativeStepper(_InnerIterationStepper):
    """(p, θ) 耦合求解，随后求 u"""

    scheme = SchemeId.HF_M_ITERATIVE

    def __init__(self, system: AssembledSystem, config: SchemeConfig):
        super().__init__(system, config)
        s = system
        self.block = block_matrix([[self.P, -s.C_hat], [-s.C_hat, self.T]])
        self._block_factor = factor_symmetric(self.block, "稳定化 (p, θ) 块矩阵")

    def _increment(self, dp: np.ndarray, dth: np.ndarray) -> float:
        return _energy(self.block, np.concatenate([dp, dth]))

    def _sweep(self, u_k, p_k, th_k, base_p, base_th):
        s = self.system
        rhs = np.concatenate([
            base_p - s.D @ u_k + self.L_p * (s.mass @ p_k),
            base_th - s.D_tilde @ u_k + self.L_theta * (s.mass @ th_k),
        ])
        x = self._block_factor.solve(rhs)
        return x[:s.n_p], x[s.n_p:]


class HFMIterativeStepper(_InnerIterationStepper):
    """温度 → 压力 → 位移"""

    scheme = SchemeId.H_F_M_ITERATIVE

    def __init__(self, system: AssembledSystem, config: SchemeConfig):
        super().__init__(system, config)
        self._p_factor = factorize_spd(self.P)
        self._th_factor = factorize_spd(self.T)

    def _sweep(self, u_k, p_k, th_k, base_p, base_th):
        s = self.system
        th_new = self._th_factor.solve(
            base_th - s.D_tilde @ u_k + s.C_hat @ p_k + self.L_theta * (s.mass @ th_k)
        )
        p_new = self._p_factor.solve(
            base_p - s.D @ u_k + s.C_hat @ th_new + self.L_p * (s.mass @ p_k)
        )
        return p_new, th_new


class FHMIterativeStepper(_InnerIterationStepper):
    """压力 → 温度 → 位移"""

    scheme = SchemeId.F_H_M_ITERATIVE

    def __init__(self, system: AssembledSystem, config: SchemeConfig):
        super().__init__(system, config)
        self._p_factor = factorize_spd(self.P)
        self._th_factor = factorize_spd(self.T)

    def _sweep(self, u_k, p_k, th_k, base_p, base_th):
        s = self.system
        p_new = self._p_factor.solve(
            base_p - s.D @ u_k + s.C_hat @ th_k + self.L_p * (s.mass @ p_k)
        )
        th_new = self._th_factor.solve(
            base_th - s.D_tilde @ u_k + s.C_hat @ p_new + self.L_theta * (s.mass @ th_k)
        )
        return p_new, th_new


def _iterative_config(scheme: SchemeId, tau: float, L_p: float, L_theta: float, K: int) -> SchemeConfig:
    return SchemeConfig(scheme=scheme, tau=tau, L_p=L_p, L_theta=L_theta, K=K)


def step_hf_m_iterative(system, state: State, t_next: float, tau: float, L_p: float, L_theta: float, K: int):
    """
    hf_m 迭代单步

    Returns:
        (State, 每次内迭代的增量范数)
    """
    result = HfMIterativeStepper(system, _iterative_config(SchemeId.HF_M_ITERATIVE, tau, L_p, L_theta, K)).step(state, t_next)
    return result.state, result.residuals


def step_h_f_m_iterative(system, state: State, t_next: float, tau: float, L_p: float, L_theta: float, K: int):
    """h_f_m 迭代单步"""
    result = HFMIterativeStepper(system, _iterative_config(SchemeId.H_F_M_ITERATIVE, tau, L_p, L_theta, K)).step(state, t_next)
    return result.state, result.residuals


def step_f_h_m_iterative(system, state: State, t_next: float, tau: float, L_p: float, L_theta: float, K: int):
    """f_h_m 迭代单步"""
    result = FHMIterativeStepper(system, _iterative_config(SchemeId.F_H_M_ITERATIVE, tau, L_p, L_theta, K)).step(state, t_next)
    return result.state, result.residuals
