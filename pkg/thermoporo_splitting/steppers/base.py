"""
时间推进的公共类型与基类
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import DivergedError, NotSPDError
from ..model import AssembledSystem
from ..numerics import MatrixLike, factorize_general, factorize_spd

logger = logging.getLogger(__name__)


class SchemeId(str, Enum):
    """时间推进格式"""
    IMPLICIT_EULER = "implicit_euler"
    IMPLICIT_MIDPOINT = "implicit_midpoint"
    SEMI_EXPLICIT_HALF = "semi_explicit_half"
    SEMI_EXPLICIT_HALF_ITERATIVE = "semi_explicit_half_iterative"
    SEMI_EXPLICIT_FULL = "semi_explicit_full"
    SIGMA_SPLITTING = "sigma_splitting"
    HF_M_ITERATIVE = "hf_m_iterative"
    H_F_M_ITERATIVE = "h_f_m_iterative"
    F_H_M_ITERATIVE = "f_h_m_iterative"


class StartupPolicy(str, Enum):
    """两步格式第一层的取法"""
    CONSTANT_HISTORY = "constant_history"
    IMPLICIT_EULER_STEP = "implicit_euler_step"


class SchemeConfig(BaseModel):
    """格式选择及其调节参数"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    scheme: SchemeId
    tau: float = Field(gt=0)
    T: Optional[float] = Field(default=None, gt=0)
    L_p: float = Field(default=0.0, ge=0)
    L_theta: float = Field(default=0.0, ge=0)
    K: int = Field(default=1, ge=1)
    sigma: float = Field(default=1.0, gt=0)
    gamma: float = Field(default=1.0, gt=0, le=1)
    startup: StartupPolicy = StartupPolicy.CONSTANT_HISTORY

    @model_validator(mode="after")
    def _check_horizon(self) -> "SchemeConfig":
        if self.T is not None and self.T < self.tau * (1 - 1e-12):
            raise ValueError(f"终止时间 T={self.T} 小于步长 τ={self.tau}")
        return self


@dataclass(frozen=True)
class State:
    """某一时间层上的 (u, p, θ)"""

    u: np.ndarray
    p: np.ndarray
    theta: np.ndarray

    @classmethod
    def zeros(cls, system: AssembledSystem) -> "State":
        return cls(np.zeros(system.n_u), np.zeros(system.n_p), np.zeros(system.n_theta))

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.u, self.p, self.theta])

    def norm(self) -> float:
        return float(np.linalg.norm(self.stacked()))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.p)) and np.all(np.isfinite(self.theta)))

    def scaled(self, factor: float) -> "State":
        return State(factor * self.u, factor * self.p, factor * self.theta)


@dataclass(frozen=True)
class StepResult:
    """单步结果及内迭代增量（或块残差）"""

    state: State
    residuals: List[float] = field(default_factory=list)


@dataclass
class Trajectory:
    """时间网格上的状态序列"""

    scheme: str
    tau: float
    times: List[float] = field(default_factory=list)
    states: List[State] = field(default_factory=list)
    residuals: List[List[float]] = field(default_factory=list)
    diverged: bool = False
    diverged_step: Optional[int] = None

    @property
    def final(self) -> State:
        return self.states[-1]

    @property
    def n_steps(self) -> int:
        return len(self.states) - 1

    def append(self, t: float, state: State, residuals: Optional[List[float]] = None) -> None:
        self.times.append(t)
        self.states.append(state)
        self.residuals.append(list(residuals or []))

    def raise_if_diverged(self) -> None:
        if self.diverged:
            raise DivergedError(f"格式 {self.scheme} 在第 {self.diverged_step} 步发散", step=self.diverged_step)


def factor_symmetric(M: MatrixLike, label: str):
    """优先按对称正定分解，失败时退回 LU"""
    try:
        return factorize_spd(M)
    except NotSPDError as e:
        logger.warning(f"{label} 不是对称正定的 ({e})，改用 LU 分解")
        return factorize_general(M)


class Stepper(ABC):
    """时间推进器基类：构造时分解所有迭代矩阵，之后只读"""

    scheme: SchemeId
    two_step: bool = False

    def __init__(self, system: AssembledSystem, config: SchemeConfig):
        """
        Args:
            system: 装配后的系统
            config: 格式配置
        """
        self.system = system
        self.config = config
        self.tau = config.tau

    @abstractmethod
    def step(self, current: State, t_next: float, previous: Optional[State] = None) -> StepResult:
        """
        从 tⁿ 推进到 t^{n+1}

        Args:
            current: 第 n 层状态
            t_next: t^{n+1}
            previous: 第 n−1 层状态（两步格式使用）

        Returns:
            StepResult: 新状态及元数据
        """

    def get_info(self) -> Dict[str, Any]:
        return {
            "type": self.__class__.__name__,
            "scheme": self.scheme.value,
            "tau": self.tau,
            "two_step": self.two_step,
        }

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(tau={self.tau})"
