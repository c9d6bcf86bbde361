"""
全耦合格式：隐式 Euler 和隐式中点法（一次求解整个 3×3 块系统）
"""

import logging
from typing import Optional

import numpy as np

from ..model import AssembledSystem
from ..numerics import block_matrix, factorize_general
from .base import SchemeConfig, SchemeId, State, StepResult, Stepper

logger = logging.getLogger(__name__)


def _split(system: AssembledSystem, x: np.ndarray) -> State:
    n_u, n_p = system.n_u, system.n_p
    return State(x[:n_u].copy(), x[n_u:n_u + n_p].copy(), x[n_u + n_p:].copy())


def _relative(residual: np.ndarray, rhs: np.ndarray) -> float:
    scale = np.linalg.norm(rhs)
    return float(np.linalg.norm(residual) / scale) if scale > 0 else float(np.linalg.norm(residual))


class ImplicitEulerStepper(Stepper):
    """
    隐式 Euler

        [A   −Dᵀ     −D̃ᵀ    ] x^{n+1} = [0  0   0 ] xⁿ + [f^{n+1} ]
        [D   C+τB    −Ĉ     ]           [D  C   −Ĉ]      [τg^{n+1}]
        [D̃   −Ĉ      C̃+τB̃  ]           [D̃  −Ĉ  C̃ ]      [τh^{n+1}]
    """

    scheme = SchemeId.IMPLICIT_EULER

    def __init__(self, system: AssembledSystem, config: SchemeConfig):
        super().__init__(system, config)
        s, tau = system, self.tau
        self.matrix = block_matrix(
            [
                [s.A, -s.D.T, -s.D_tilde.T],
                [s.D, s.C + tau * s.B, -s.C_hat],
                [s.D_tilde, -s.C_hat, s.C_tilde + tau * s.B_tilde],
            ]
        )
        self._factor = factorize_general(self.matrix)

    def step(self, current: State, t_next: float, previous: Optional[State] = None) -> StepResult:
        s, tau = self.system, self.tau
        u, p, th = current.u, current.p, current.theta
        rhs = np.concatenate([
            s.f(t_next),
            s.D @ u + s.C @ p - s.C_hat @ th + tau * s.g(t_next),
            s.D_tilde @ u - s.C_hat @ p + s.C_tilde @ th + tau * s.h(t_next),
        ])
        x = self._factor.solve(rhs)
        return StepResult(_split(s, x), [_relative(self.matrix @ x - rhs, rhs)])


class ImplicitMidpointStepper(Stepper):
    """
    隐式中点法（所有行取梯形平均，载荷取 t^{n+1/2}）

    代数行乘以 2/τ 后为
        A u^{n+1} − Dᵀp^{n+1} − D̃ᵀθ^{n+1} = −(A uⁿ − Dᵀpⁿ − D̃ᵀθⁿ) + 2 f^{n+1/2}
    """

    scheme = SchemeId.IMPLICIT_MIDPOINT

    def __init__(self, system: AssembledSystem, config: SchemeConfig):
        super().__init__(system, config)
        s, half = system, 0.5 * self.tau
        self.matrix = block_matrix(
            [
                [s.A, -s.D.T, -s.D_tilde.T],
                [s.D, s.C + half * s.B, -s.C_hat],
                [s.D_tilde, -s.C_hat, s.C_tilde + half * s.B_tilde],
            ]
        )
        self._factor = factorize_general(self.matrix)

    def step(self, current: State, t_next: float, previous: Optional[State] = None) -> StepResult:
        s, tau = self.system, self.tau
        half = 0.5 * tau
        t_mid = t_next - half
        u, p, th = current.u, current.p, current.theta
        constraint = s.A @ u - s.D.T @ p - s.D_tilde.T @ th
        rhs = np.concatenate([
            2.0 * s.f(t_mid) - constraint,
            s.D @ u + s.C @ p - half * (s.B @ p) - s.C_hat @ th + tau * s.g(t_mid),
            s.D_tilde @ u - s.C_hat @ p + s.C_tilde @ th - half * (s.B_tilde @ th) + tau * s.h(t_mid),
        ])
        x = self._factor.solve(rhs)
        return StepResult(_split(s, x), [_relative(self.matrix @ x - rhs, rhs)])


def step_implicit_euler(system: AssembledSystem, state: State, t_next: float, tau: float) -> State:
    """隐式 Euler 单步"""
    config = SchemeConfig(scheme=SchemeId.IMPLICIT_EULER, tau=tau)
    return ImplicitEulerStepper(system, config).step(state, t_next).state


def step_implicit_midpoint(system: AssembledSystem, state: State, t_half: float, tau: float) -> State:
    """隐式中点法单步，t_half = t^{n+1/2}"""
    config = SchemeConfig(scheme=SchemeId.IMPLICIT_MIDPOINT, tau=tau)
    return ImplicitMidpointStepper(system, config).step(state, t_half + 0.5 * tau).state
