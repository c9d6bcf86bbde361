"""
标准问题：地热有限元参数组和 3 自由度玩具系统
"""

import logging
import math
from dataclasses import replace
from typing import Callable, Optional, Tuple, Union

import numpy as np

from .errors import InvalidSizeError, OutOfRangeError
from .fem import assemble_system, build_mesh
from .model import AssembledSystem, MaterialParams, ProblemData, SourceTerms, zero_load
from .numerics import solve_spd

logger = logging.getLogger(__name__)

GEOTHERMAL_PARAMS = MaterialParams(
    lam=1.2e10,
    mu=6.0e9,
    kappa_over_nu=6.33e2,
    kappa_tilde=1.0e2,
    c0=7.8e3,
    c0_hat=3.03e-11,
    c0_tilde=0.92e3,
    alpha=0.97,
    beta=3.96e6,
)

TOY_ALPHA_RANGE = (0.0, 0.64)
TOY_C0_HAT = 0.5
TOY_C0 = 2.0
TOY_CTILDE_RANGE = (TOY_C0_HAT, TOY_C0 + 3.5)
TOY_FINAL_TIME = 0.1

InitialField = Union[Callable[[np.ndarray, np.ndarray], np.ndarray], np.ndarray]


def smooth_bump(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """sin(πx)·sin(πy)"""
    return np.sin(np.pi * x) * np.sin(np.pi * y)


def _initial_vector(field: Optional[InitialField], space, default) -> np.ndarray:
    if field is None:
        field = default
    if callable(field):
        return space.restrict(space.interpolate(field))
    return np.asarray(field, dtype=float).copy()


def geothermal_problem(
    n: int = 8,
    u_degree: int = 1,
    *,
    T: float = 1.0,
    p0: Optional[InitialField] = None,
    theta0: Optional[InitialField] = None,
    sources: Optional[SourceTerms] = None,
    params: Optional[MaterialParams] = None,
) -> Tuple[AssembledSystem, ProblemData]:
    """
    单位正方形上的地热问题

    Args:
        n: 每边剖分数（≥ 2）
        u_degree: 位移次数 1 或 2
        T: 终止时间
        p0, theta0: 初值（函数 f(x, y) 或内部自由度向量），默认 sin(πx)sin(πy)
        sources: 源项，默认全零
        params: 替换预设的材料参数

    Returns:
        (AssembledSystem, ProblemData)
    """
    if n < 2:
        raise InvalidSizeError(f"地热问题需要 n ≥ 2，得到 {n}")
    system = assemble_system(build_mesh(n), params or GEOTHERMAL_PARAMS, u_degree, sources)
    system = replace(system, name="geothermal")
    data = ProblemData(
        p0=_initial_vector(p0, system.p_space, smooth_bump),
        theta0=_initial_vector(theta0, system.p_space, smooth_bump),
        T=float(T),
    )
    data.check(system)
    return system, data


def toy_matrix_a() -> np.ndarray:
    """(1/(2−√2))·tridiag(−1, 2, −1)"""
    tridiag = np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]])
    return tridiag / (2.0 - math.sqrt(2.0))


def toy_problem(alpha: float, c0_tilde: float, *, T: float = TOY_FINAL_TIME) -> Tuple[AssembledSystem, ProblemData]:
    """
    3+1+1 维玩具系统，β = α

    Args:
        alpha: 耦合系数，取值 (0, 0.64)
        c0_tilde: 热容，取值 (0.5, 5.5)

    Raises:
        OutOfRangeError: 参数超出范围
    """
    if not TOY_ALPHA_RANGE[0] < alpha < TOY_ALPHA_RANGE[1]:
        raise OutOfRangeError(f"α 必须在 {TOY_ALPHA_RANGE} 中，得到 {alpha}")
    if not TOY_CTILDE_RANGE[0] < c0_tilde < TOY_CTILDE_RANGE[1]:
        raise OutOfRangeError(f"c̃₀ 必须在 {TOY_CTILDE_RANGE} 中，得到 {c0_tilde}")

    # λ = 0, μ = 1 使物理模式下 c_a = μ+λ = λ_min(A) = 1
    params = MaterialParams(
        lam=0.0,
        mu=1.0,
        kappa_over_nu=2.0,
        kappa_tilde=1.0,
        c0=TOY_C0,
        c0_hat=TOY_C0_HAT,
        c0_tilde=c0_tilde,
        alpha=alpha,
        beta=alpha,
    )
    row = np.array([[2.0, 1.0, 2.0]])
    system = AssembledSystem(
        A=toy_matrix_a(),
        B=np.array([[2.0]]),
        B_tilde=np.array([[1.0]]),
        C=np.array([[TOY_C0]]),
        C_hat=np.array([[TOY_C0_HAT]]),
        C_tilde=np.array([[c0_tilde]]),
        D=alpha * row,
        D_tilde=alpha * row,
        f=zero_load(3),
        g=zero_load(1),
        h=zero_load(1),
        params=params,
        mass=np.eye(1),
        name="toy",
    )
    data = ProblemData(p0=np.ones(1), theta0=np.ones(1), T=float(T))
    return system, data


def consistent_u0(
    system: AssembledSystem,
    p0: np.ndarray,
    theta0: np.ndarray,
    t0: float = 0.0,
) -> np.ndarray:
    """
    由平衡方程确定初始位移 u⁰ = A⁻¹(f(t0) + Dᵀp⁰ + D̃ᵀθ⁰)
    """
    rhs = system.f(t0) + system.D.T @ p0 + system.D_tilde.T @ theta0
    return solve_spd(system.A, rhs)


def steady_state(system: AssembledSystem, t: float = 0.0) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    常载荷下的稳态：B p = g，B̃ θ = h，A u = f + Dᵀp + D̃ᵀθ

    Returns:
        (u, p, θ)
    """
    p = solve_spd(system.B, system.g(t))
    theta = solve_spd(system.B_tilde, system.h(t))
    u = consistent_u0(system, p, theta, t)
    return u, p, theta


def preset_problem(name: str, **options) -> Tuple[AssembledSystem, ProblemData]:
    """按名称构造预设问题（geothermal / toy）"""
    if name == "geothermal":
        return geothermal_problem(
            n=options.get("n", 8),
            u_degree=options.get("u_degree", 1),
            T=options.get("T", 1.0),
        )
    if name == "toy":
        return toy_problem(
            options.get("alpha", 0.2),
            options.get("c0_tilde", 2.0),
            T=options.get("T", TOY_FINAL_TIME),
        )
    raise OutOfRangeError(f"未知的预设问题: {name}")
