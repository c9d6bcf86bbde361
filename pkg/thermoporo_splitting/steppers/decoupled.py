"""
半显式格式

位移方程用上一时间层的压力和温度显式求解，其余方程随后求解：
- 半解耦：(p, θ) 仍耦合求解
- 全解耦：p 与 θ 各自求解，Ĉ 项显式处理（两步格式）
- σ 分裂：全解耦的一族推广，σ = 1 时重合
- 带阻尼的内迭代：半解耦格式重复 K 次
"""

import logging
from typing import Optional

import numpy as np

from ..model import AssembledSystem
from ..numerics import block_matrix, factorize_spd
from .base import SchemeConfig, SchemeId, State, StepResult, Stepper, factor_symmetric

logger = logging.getLogger(__name__)


class _ExplicitDisplacement(Stepper):
    """A u^{n+1} = f^{n+1} + Dᵀp + D̃ᵀθ"""

    def __init__(self, system: AssembledSystem, config: SchemeConfig):
        super().__init__(system, config)
        self._a_factor = factorize_spd(system.A)

    def _displacement(self, p: np.ndarray, theta: np.ndarray, t_next: float) -> np.ndarray:
        s = self.system
        return self._a_factor.solve(s.f(t_next) + s.D.T @ p + s.D_tilde.T @ theta)


class SemiExplicitHalfStepper(_ExplicitDisplacement):
    """先求 u^{n+1}，再解耦合的 (p, θ) 块 [[C+τB, −Ĉ], [−Ĉ, C̃+τB̃]]"""

    scheme = SchemeId.SEMI_EXPLICIT_HALF

    def __init__(self, system: AssembledSystem, config: SchemeConfig):
        super().__init__(system, config)
        s, tau = system, self.tau
        self.block = block_matrix([[s.C + tau * s.B, -s.C_hat], [-s.C_hat, s.C_tilde + tau * s.B_tilde]])
        self._block_factor = factor_symmetric(self.block, "(p, θ) 块矩阵")

    def _pressure_temperature(self, current: State, u_next: np.ndarray, t_next: float):
        s, tau = self.system, self.tau
        du = current.u - u_next
        p, th = current.p, current.theta
        rhs = np.concatenate([
            s.D @ du + s.C @ p - s.C_hat @ th + tau * s.g(t_next),
            s.D_tilde @ du - s.C_hat @ p + s.C_tilde @ th + tau * s.h(t_next),
        ])
        x = self._block_factor.solve(rhs)
        return x[:s.n_p], x[s.n_p:]

    def step(self, current: State, t_next: float, previous: Optional[State] = None) -> StepResult:
        u_next = self._displacement(current.p, current.theta, t_next)
        p_next, th_next = self._pressure_temperature(current, u_next, t_next)
        return StepResult(State(u_next, p_next, th_next))


class SemiExplicitHalfIterativeStepper(SemiExplicitHalfStepper):
    """
    半解耦格式的 K 次内迭代

    第 k 次用上一内迭代的 (p, θ) 求 u，再解 (p̂, θ̂)；除最后一次外做阻尼
    p^{k+1} = γ p̂ + (1−γ) pⁿ。输出 (u^K, p̂^K, θ̂^K)。
    """

    scheme = SchemeId.SEMI_EXPLICIT_HALF_ITERATIVE

    def __init__(self, system: AssembledSystem, config: SchemeConfig):
        super().__init__(system, config)
        self.K = config.K
        self.gamma = config.gamma

    def step(self, current: State, t_next: float, previous: Optional[State] = None) -> StepResult:
        g = self.gamma
        p_k, th_k = current.p, current.theta
        increments = []
        for k in range(self.K):
            u_next = self._displacement(p_k, th_k, t_next)
            p_hat, th_hat = self._pressure_temperature(current, u_next, t_next)
            increments.append(float(np.linalg.norm(np.concatenate([p_hat - p_k, th_hat - th_k]))))
            if k < self.K - 1:
                p_k = g * p_hat + (1.0 - g) * current.p
                th_k = g * th_hat + (1.0 - g) * current.theta
        return StepResult(State(u_next, p_hat, th_hat), increments)


class SemiExplicitFullStepper(_ExplicitDisplacement):
    """
    全解耦格式

        (C+τB) p^{n+1}  = D(uⁿ−u^{n+1}) + C pⁿ + Ĉθⁿ − Ĉθ^{n−1} + τg
        (C̃+τB̃) θ^{n+1} = D̃(uⁿ−u^{n+1}) + C̃ θⁿ + Ĉpⁿ − Ĉp^{n−1} + τh
    """

    scheme = SchemeId.SEMI_EXPLICIT_FULL
    two_step = True

    def __init__(self, system: AssembledSystem, config: SchemeConfig):
        super().__init__(system, config)
        s, tau = system, self.tau
        self._p_factor = factorize_spd(s.C + tau * s.B)
        self._th_factor = factorize_spd(s.C_tilde + tau * s.B_tilde)

    def step(self, current: State, t_next: float, previous: Optional[State] = None) -> StepResult:
        s, tau = self.system, self.tau
        previous = previous or current
        u_next = self._displacement(current.p, current.theta, t_next)
        du = current.u - u_next
        p_next = self._p_factor.solve(
            s.D @ du + s.C @ current.p + s.C_hat @ (current.theta - previous.theta) + tau * s.g(t_next)
        )
        th_next = self._th_factor.solve(
            s.D_tilde @ du + s.C_tilde @ current.theta + s.C_hat @ (current.p - previous.p) + tau * s.h(t_next)
        )
        return StepResult(State(u_next, p_next, th_next))


class SigmaSplittingStepper(_ExplicitDisplacement):
    """
    σ 分裂（附加与全解耦格式相同的载荷项）

        (σC+τB) p^{n+1} = D(uⁿ−u^{n+1}) + (2σ−1)C pⁿ + Ĉθⁿ + (1−σ)C p^{n−1} − Ĉθ^{n−1} + τg
    θ 方程对称。
    """

    scheme = SchemeId.SIGMA_SPLITTING
    two_step = True

    def __init__(self, system: AssembledSystem, config: SchemeConfig):
        super().__init__(system, config)
        s, tau, sigma = system, self.tau, config.sigma
        self.sigma = sigma
        self._p_factor = factorize_spd(sigma * s.C + tau * s.B)
        self._th_factor = factorize_spd(sigma * s.C_tilde + tau * s.B_tilde)

    def step(self, current: State, t_next: float, previous: Optional[State] = None) -> StepResult:
        s, tau, sigma = self.system, self.tau, self.sigma
        previous = previous or current
        u_next = self._displacement(current.p, current.theta, t_next)
        du = current.u - u_next
        p_rhs = (
            s.D @ du
            + (2 * sigma - 1) * (s.C @ current.p)
            + s.C_hat @ current.theta
            + (1 - sigma) * (s.C @ previous.p)
            - s.C_hat @ previous.theta
            + tau * s.g(t_next)
        )
        th_rhs = (
            s.D_tilde @ du
            + (2 * sigma - 1) * (s.C_tilde @ current.theta)
            + s.C_hat @ current.p
            + (1 - sigma) * (s.C_tilde @ previous.theta)
            - s.C_hat @ previous.p
            + tau * s.h(t_next)
        )
        return StepResult(State(u_next, self._p_factor.solve(p_rhs), self._th_factor.solve(th_rhs)))


def step_semi_explicit_half(system: AssembledSystem, state: State, t_next: float, tau: float) -> State:
    """半解耦半显式单步"""
    config = SchemeConfig(scheme=SchemeId.SEMI_EXPLICIT_HALF, tau=tau)
    return SemiExplicitHalfStepper(system, config).step(state, t_next).state


def step_semi_explicit_half_iterative(
    system: AssembledSystem, state: State, t_next: float, tau: float, K: int, gamma: float
) -> State:
    """带阻尼内迭代的半解耦单步"""
    config = SchemeConfig(scheme=SchemeId.SEMI_EXPLICIT_HALF_ITERATIVE, tau=tau, K=K, gamma=gamma)
    return SemiExplicitHalfIterativeStepper(system, config).step(state, t_next).state


def step_semi_explicit_full(
    system: AssembledSystem, state: State, previous: State, t_next: float, tau: float
) -> State:
    """全解耦半显式单步"""
    config = SchemeConfig(scheme=SchemeId.SEMI_EXPLICIT_FULL, tau=tau)
    return SemiExplicitFullStepper(system, config).step(state, t_next, previous).state


def step_sigma_splitting(
    system: AssembledSystem, state: State, previous: State, t_next: float, tau: float, sigma: float
) -> State:
    """σ 分裂单步"""
    config = SchemeConfig(scheme=SchemeId.SIGMA_SPLITTING, tau=tau, sigma=sigma)
    return SigmaSplittingStepper(system, config).step(state, t_next, previous).state
