"""
玩具问题上 (α, c̃₀) 平面的条件锐度扫描
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..conditions import coupling_constants, fd_precondition, omega_fd, omega_hd, spectral_bounds
from ..errors import OutOfRangeError, ThermoPoroError
from ..problems import TOY_ALPHA_RANGE, TOY_CTILDE_RANGE, TOY_FINAL_TIME, toy_problem
from ..steppers import SchemeConfig, SchemeId, run
from ..utils.logging import log_performance
from .metrics import final_time_error

logger = logging.getLogger(__name__)

SWEEP_TAU = 0.1 * 2.0**-8
SWEEP_REFERENCE_TAU = 0.1 * 2.0**-9
CONVERGENCE_THRESHOLD = 1e-2
DEFAULT_GRID = (32, 32)

SWEEP_SCHEMES = (SchemeId.SEMI_EXPLICIT_HALF, SchemeId.SEMI_EXPLICIT_FULL)


class CellClass(str, Enum):
    GUARANTEED = "guaranteed"
    CONVERGED = "converged"
    DIVERGED = "diverged"


@dataclass(frozen=True)
class SweepCell:
    """扫描网格的一个格点"""

    alpha: float
    c0_tilde: float
    omega: float
    e_T: float
    classification: CellClass
    guaranteed: bool = False

    @property
    def violation(self) -> bool:
        """条件保证收敛但实际没有收敛"""
        return self.guaranteed and self.classification is CellClass.DIVERGED

    def as_row(self) -> Dict[str, object]:
        return {
            "alpha": self.alpha,
            "ctilde0": self.c0_tilde,
            "omega": self.omega,
            "e_T": self.e_T,
            "class": self.classification.value,
        }


def sweep_axis(low: float, high: float, count: int) -> np.ndarray:
    """(low, high) 内部的 count 个等距点（各子区间中点）"""
    if count < 1:
        raise OutOfRangeError(f"扫描点数必须 ≥ 1: {count}")
    return low + (high - low) * (np.arange(count) + 0.5) / count


def sweep_grid(rows: int = DEFAULT_GRID[0], cols: int = DEFAULT_GRID[1]) -> Tuple[np.ndarray, np.ndarray]:
    """α 方向 rows 个点、c̃₀ 方向 cols 个点"""
    return sweep_axis(*TOY_ALPHA_RANGE, rows), sweep_axis(*TOY_CTILDE_RANGE, cols)


def classify(omega: float, guaranteed: bool, e_T: float, diverged: bool) -> CellClass:
    """
    发散或 e_T ≥ 10⁻² 为 diverged；否则条件成立为 guaranteed，其余为 converged
    """
    if diverged or not math.isfinite(e_T) or e_T >= CONVERGENCE_THRESHOLD:
        return CellClass.DIVERGED
    if guaranteed:
        return CellClass.GUARANTEED
    return CellClass.CONVERGED


def sweep_cell(
    alpha: float,
    c0_tilde: float,
    scheme: SchemeId,
    tau: float = SWEEP_TAU,
    reference_tau: float = SWEEP_REFERENCE_TAU,
) -> SweepCell:
    """
    单个格点：谱常数下的 ω、被测格式与隐式 Euler 参考的终止误差

    Raises:
        OutOfRangeError: 参数超出玩具问题范围或格式不受支持
    """
    scheme = SchemeId(scheme)
    if scheme not in SWEEP_SCHEMES:
        raise OutOfRangeError(f"扫描只支持 {[s.value for s in SWEEP_SCHEMES]}，得到 {scheme.value}")
    system, data = toy_problem(alpha, c0_tilde, T=TOY_FINAL_TIME)

    try:
        constants = coupling_constants(spectral_bounds(system))
        if scheme == SchemeId.SEMI_EXPLICIT_HALF:
            omega = omega_hd(constants)
            guaranteed = omega <= 1.0
        else:
            omega = omega_fd(constants)
            guaranteed = fd_precondition(constants) and omega <= 1.0
    except ThermoPoroError as e:
        logger.warning(f"α={alpha:g}, c̃₀={c0_tilde:g}: ω 无法计算 ({e})")
        omega, guaranteed = math.inf, False

    e_T = math.inf
    diverged = False
    try:
        traj = run(system, data, SchemeConfig(scheme=scheme, tau=tau))
        diverged = traj.diverged
        if not diverged:
            ref = run(system, data, SchemeConfig(scheme=SchemeId.IMPLICIT_EULER, tau=reference_tau))
            ref.raise_if_diverged()
            e_T = final_time_error(ref.final, traj.final, system).e_T
    except ThermoPoroError as e:
        logger.warning(f"α={alpha:g}, c̃₀={c0_tilde:g}: 运行失败 ({e})")
        diverged = True

    cell = SweepCell(
        alpha=float(alpha),
        c0_tilde=float(c0_tilde),
        omega=float(omega),
        e_T=float(e_T),
        classification=classify(omega, guaranteed, e_T, diverged),
        guaranteed=bool(guaranteed),
    )
    if cell.violation:
        logger.warning(f"{scheme.value} α={alpha:g}, c̃₀={c0_tilde:g}: ω={omega:.4g} 满足条件但 e_T={e_T:.3e} 未收敛")
    logger.debug(f"{scheme.value} α={alpha:.4f} c̃₀={c0_tilde:.4f}: ω={omega:.4g} e_T={e_T:.3e} {cell.classification.value}")
    return cell


@log_performance
def sharpness_sweep(
    alphas: Sequence[float],
    c0_tildes: Sequence[float],
    scheme: SchemeId = SchemeId.SEMI_EXPLICIT_HALF,
    *,
    tau: float = SWEEP_TAU,
    reference_tau: float = SWEEP_REFERENCE_TAU,
    workers: Optional[int] = 1,
) -> List[SweepCell]:
    """
    扫描 α × c̃₀ 网格

    Args:
        alphas: α 取值（外层）
        c0_tildes: c̃₀ 取值（内层）
        scheme: semi_explicit_half 或 semi_explicit_full
        tau: 被测步长
        reference_tau: 参考步长
        workers: 并行线程数

    Returns:
        List[SweepCell]: 按 α 外层、c̃₀ 内层排列，与线程数无关
    """
    points = [(float(a), float(c)) for a in alphas for c in c0_tildes]
    logger.info(f"扫描 {scheme.value}: {len(alphas)}×{len(c0_tildes)} 个格点")

    def evaluate(point: Tuple[float, float]) -> SweepCell:
        return sweep_cell(point[0], point[1], scheme, tau, reference_tau)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(evaluate, points))
    else:
        cells = [evaluate(point) for point in points]

    counts = {c.value: sum(cell.classification == c for cell in cells) for c in CellClass}
    logger.info(f"扫描结果: {counts}")
    violations = sum(cell.violation for cell in cells)
    if violations:
        logger.warning(f"{violations} 个满足条件的格点没有收敛")
    return cells
