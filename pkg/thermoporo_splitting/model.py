"""
核心数据类型：材料参数、源项、装配后的半离散系统和问题数据
"""

import logging
import math
from dataclasses import dataclass, fields, replace
from typing import Callable, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatchError, InvalidParameterError
from .numerics import MatrixLike, block_matrix

logger = logging.getLogger(__name__)

LoadProvider = Callable[[float], np.ndarray]
ScalarSource = Callable[[np.ndarray, np.ndarray, float], np.ndarray]
VectorSource = Callable[[np.ndarray, np.ndarray, float], Tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class MaterialParams:
    """
    热-孔隙弹性介质的物理常数

    Attributes:
        lam, mu: Lamé 系数 (Pa)
        kappa_over_nu: 渗透率/粘度
        kappa_tilde: 热传导系数
        c0: Biot 模量的倒数
        c0_hat: 热膨胀耦合系数
        c0_tilde: 热容
        alpha: Biot–Willis 系数
        beta: 热应力系数
    """

    lam: float
    mu: float
    kappa_over_nu: float
    kappa_tilde: float
    c0: float
    c0_hat: float
    c0_tilde: float
    alpha: float
    beta: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise InvalidParameterError(f"参数 {f.name} 不是有限值: {value}")
        for name in ("mu", "kappa_over_nu", "kappa_tilde", "c0", "c0_tilde"):
            if getattr(self, name) <= 0.0:
                raise InvalidParameterError(f"参数 {name} 必须为正: {getattr(self, name)}")
        for name in ("lam", "c0_hat", "alpha", "beta"):
            if getattr(self, name) < 0.0:
                raise InvalidParameterError(f"参数 {name} 不能为负: {getattr(self, name)}")

    @property
    def ellipticity_assumption(self) -> bool:
        """ĉ₀ < c₀ 且 ĉ₀ < c̃₀"""
        return self.c0_hat < self.c0 and self.c0_hat < self.c0_tilde

    def with_updates(self, **changes) -> "MaterialParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class SourceTerms:
    """体积源项 f (向量), g, h (标量)；None 表示零"""

    f: Optional[VectorSource] = None
    g: Optional[ScalarSource] = None
    h: Optional[ScalarSource] = None


def zero_load(n: int) -> LoadProvider:
    """返回恒为零的载荷"""
    zeros = np.zeros(n)
    zeros.setflags(write=False)

    def provider(t: float) -> np.ndarray:
        return zeros.copy()

    return provider


def constant_load(vector: np.ndarray) -> LoadProvider:
    """返回不随时间变化的载荷"""
    frozen = np.array(vector, dtype=float)

    def provider(t: float) -> np.ndarray:
        return frozen.copy()

    return provider


@dataclass(frozen=True)
class AssembledSystem:
    """
    半离散系统

        A u − Dᵀp − D̃ᵀθ = f
        D u̇ + C ṗ − Ĉ θ̇ + B p = g
        D̃ u̇ + C̃ θ̇ − Ĉ ṗ + B̃ θ = h
    """

    A: MatrixLike
    B: MatrixLike
    B_tilde: MatrixLike
    C: MatrixLike
    C_hat: MatrixLike
    C_tilde: MatrixLike
    D: MatrixLike
    D_tilde: MatrixLike
    f: LoadProvider
    g: LoadProvider
    h: LoadProvider
    params: MaterialParams
    mass: MatrixLike
    u_space: Optional[object] = None
    p_space: Optional[object] = None
    name: str = "custom"

    @property
    def n_u(self) -> int:
        return self.A.shape[0]

    @property
    def n_p(self) -> int:
        return self.B.shape[0]

    @property
    def n_theta(self) -> int:
        return self.B_tilde.shape[0]

    @property
    def ellipticity_assumption(self) -> bool:
        return self.params.ellipticity_assumption

    def block_mass(self) -> sp.csr_matrix:
        """[[C, −Ĉ], [−Ĉ, C̃]]"""
        return block_matrix([[self.C, -self.C_hat], [-self.C_hat, self.C_tilde]])

    def block_diffusion(self) -> sp.csr_matrix:
        """diag(B, B̃)"""
        return block_matrix([[self.B, None], [None, self.B_tilde]])

    def block_coupling(self) -> sp.csr_matrix:
        """𝔻 = [D; D̃]"""
        return block_matrix([[self.D], [self.D_tilde]])

    def with_loads(
        self,
        f: Optional[LoadProvider] = None,
        g: Optional[LoadProvider] = None,
        h: Optional[LoadProvider] = None,
    ) -> "AssembledSystem":
        return replace(self, f=f or self.f, g=g or self.g, h=h or self.h)


@dataclass(frozen=True)
class ProblemData:
    """
    初值、终止时间以及可选的载荷覆盖

    f, g, h 为 None 时使用系统自带的载荷。
    """

    p0: np.ndarray
    theta0: np.ndarray
    T: float
    f: Optional[LoadProvider] = None
    g: Optional[LoadProvider] = None
    h: Optional[LoadProvider] = None

    def check(self, system: AssembledSystem) -> None:
        if self.p0.shape != (system.n_p,) or self.theta0.shape != (system.n_theta,):
            raise DimensionMismatchError(
                f"初值长度 ({self.p0.size}, {self.theta0.size}) 与系统 ({system.n_p}, {system.n_theta}) 不一致"
            )

    def apply_loads(self, system: AssembledSystem) -> AssembledSystem:
        return system.with_loads(self.f, self.g, self.h)
