"""
误差度量与网格间插值
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DimensionMismatchError, NegativeQuadraticFormError, ZeroReferenceError
from ..model import AssembledSystem
from ..numerics import MatrixLike
from ..steppers import State

logger = logging.getLogger(__name__)

NEGATIVE_FORM_TOL = 1e-12


def energy_norm(M: MatrixLike, v: np.ndarray) -> float:
    """
    √(vᵀMv)

    Raises:
        NegativeQuadraticFormError: vᵀMv < −1e-12（按 max|M|·‖v‖² 放缩）
    """
    v = np.asarray(v, dtype=float)
    if M.shape != (v.size, v.size):
        raise DimensionMismatchError(f"矩阵形状 {M.shape} 与向量长度 {v.size} 不一致")
    q = float(v @ (M @ v))
    scale = max(1.0, float(abs(M).max()) * float(v @ v))
    if q < -NEGATIVE_FORM_TOL * scale:
        raise NegativeQuadraticFormError(f"二次型为负: {q:.3e}")
    return float(np.sqrt(max(q, 0.0)))


@dataclass(frozen=True)
class ErrorReport:
    """终止时刻的相对误差"""

    e_u: float
    e_p: float
    e_theta: float
    e_T: float
    tau: float = float("nan")
    h: float = float("nan")
    scheme: str = ""


def _relative(M: MatrixLike, ref: np.ndarray, approx: np.ndarray, label: str) -> float:
    denominator = energy_norm(M, ref)
    if denominator == 0.0:
        raise ZeroReferenceError(f"参考解的 {label} 范数为零")
    return energy_norm(M, approx - ref) / denominator


def final_time_error(
    ref: State,
    approx: State,
    system: AssembledSystem,
    tau: float = float("nan"),
    scheme: str = "",
) -> ErrorReport:
    """
    A-、C-、C̃-范数下的相对误差之和

    Args:
        ref: 参考解
        approx: 近似解
        system: 提供范数矩阵的系统

    Raises:
        ZeroReferenceError: 参考解某一分量范数为零
    """
    e_u = _relative(system.A, ref.u, approx.u, "A")
    e_p = _relative(system.C, ref.p, approx.p, "C")
    e_th = _relative(system.C_tilde, ref.theta, approx.theta, "C̃")
    h = system.u_space.mesh.h if system.u_space is not None else float("nan")
    return ErrorReport(e_u=e_u, e_p=e_p, e_theta=e_th, e_T=e_u + e_p + e_th, tau=tau, h=h, scheme=scheme)


def _transfer(coarse_space, fine_space, inner: np.ndarray) -> np.ndarray:
    full = coarse_space.extend(inner)
    values = coarse_space.evaluate(full, fine_space.dof_coords)
    fine_full = values if coarse_space.components == 1 else np.concatenate(list(values))
    return fine_space.restrict(fine_full)


def prolong(coarse: State, coarse_system: AssembledSystem, fine_system: AssembledSystem) -> State:
    """
    把粗网格上的有限元函数在细网格自由度处求值

    网格不必嵌套；边界自由度上的值为零。
    """
    if coarse_system.u_space is None or fine_system.u_space is None:
        raise DimensionMismatchError("插值需要有限元系统")
    cu, fu = coarse_system.u_space, fine_system.u_space
    cp, fp = coarse_system.p_space, fine_system.p_space
    return State(
        u=_transfer(cu, fu, coarse.u),
        p=_transfer(cp, fp, coarse.p),
        theta=_transfer(cp, fp, coarse.theta),
    )


def fit_slope(taus, errors, cutoff: float = 0.5) -> Optional[float]:
    """
    log e_T 对 log τ 的最小二乘斜率，只用 e_T < cutoff 且为正的点

    Returns:
        斜率；可用点少于两个时返回 None
    """
    taus = np.asarray(taus, dtype=float)
    errors = np.asarray(errors, dtype=float)
    mask = np.isfinite(errors) & (errors > 0) & (errors < cutoff)
    if np.count_nonzero(mask) < 2:
        return None
    slope, _ = np.polyfit(np.log(taus[mask]), np.log(errors[mask]), 1)
    return float(slope)
