"""
时间收敛实验

对每个格式、每个步长推进到终止时刻，与参考解比较，拟合 log e_T 对 log τ 的斜率。
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ConfigError, RangeError, ThermoPoroError
from ..model import AssembledSystem, ProblemData
from ..numerics import MatrixLike
from ..steppers import DelayProblem, SchemeConfig, SchemeId, State, run, run_delay
from ..utils.logging import LogContext, log_performance
from .metrics import ErrorReport, final_time_error, fit_slope, prolong

logger = logging.getLogger(__name__)

REFERENCE_REFINEMENT = 8


@dataclass
class ConvergenceStudy:
    """收敛表与各格式的斜率"""

    reports: List[ErrorReport] = field(default_factory=list)
    slopes: Dict[str, Optional[float]] = field(default_factory=dict)
    reference: Optional[SchemeConfig] = None

    def for_scheme(self, scheme: str) -> List[ErrorReport]:
        return [r for r in self.reports if r.scheme == scheme]


def midpoint_reference(taus: Sequence[float], refinement: int = REFERENCE_REFINEMENT) -> SchemeConfig:
    """以最小步长的 1/refinement 做隐式中点参考"""
    return SchemeConfig(scheme=SchemeId.IMPLICIT_MIDPOINT, tau=min(taus) / refinement)


def _mesh_h(system: AssembledSystem) -> float:
    return system.u_space.mesh.h if system.u_space is not None else float("nan")


def _diverged_report(config: SchemeConfig, system: AssembledSystem) -> ErrorReport:
    inf = math.inf
    return ErrorReport(
        e_u=inf, e_p=inf, e_theta=inf, e_T=inf, tau=config.tau, h=_mesh_h(system), scheme=config.scheme.value
    )


def reference_solution(system: AssembledSystem, data: ProblemData, reference: SchemeConfig) -> State:
    """
    参考解的终止时刻状态

    Raises:
        DivergedError: 参考格式发散
    """
    with LogContext(logger, f"参考解 {reference.scheme.value} τ={reference.tau:g}"):
        traj = run(system, data, reference)
    traj.raise_if_diverged()
    return traj.final


@log_performance
def convergence_study(
    system: AssembledSystem,
    data: ProblemData,
    schemes: Sequence[SchemeConfig],
    taus: Sequence[float],
    reference: Optional[SchemeConfig] = None,
    *,
    reference_system: Optional[AssembledSystem] = None,
    reference_data: Optional[ProblemData] = None,
    workers: int = 1,
) -> ConvergenceStudy:
    """
    收敛实验

    Args:
        system: 被测系统
        data: 初值与终止时间
        schemes: 格式模板（其中的 τ 被 taus 覆盖）
        taus: 步长序列
        reference: 参考格式，默认隐式中点、τ_min/8
        reference_system, reference_data: 在更细网格上求参考解；近似解插值到该网格后再比较
        workers: 并行线程数

    Returns:
        ConvergenceStudy: 按 (格式, τ) 顺序的误差表和斜率

    Raises:
        RangeError: 参考步长比被测步长大
    """
    taus = [float(t) for t in taus]
    if not taus:
        raise RangeError("步长序列为空")
    reference = reference or midpoint_reference(taus)
    if reference.tau > min(taus) * (1 + 1e-12):
        raise RangeError(f"参考步长 {reference.tau} 大于最小被测步长 {min(taus)}", token=str(reference.tau))

    fine_system = reference_system or system
    fine_data = reference_data or data
    ref = reference_solution(fine_system, fine_data, reference)

    tasks = [template.model_copy(update={"tau": tau}) for template in schemes for tau in taus]

    def evaluate(config: SchemeConfig) -> ErrorReport:
        try:
            traj = run(system, data, config)
        except ConfigError:
            raise
        except ThermoPoroError as e:
            logger.warning(f"{config.scheme.value} τ={config.tau:g} 失败: {e}")
            return _diverged_report(config, system)
        if traj.diverged:
            return _diverged_report(config, system)
        final = traj.final
        if reference_system is None:
            return final_time_error(ref, final, system, tau=config.tau, scheme=config.scheme.value)
        # 在参考网格上度量，h 仍记被测网格的
        report = final_time_error(
            ref, prolong(final, system, fine_system), fine_system, tau=config.tau, scheme=config.scheme.value
        )
        return replace(report, h=_mesh_h(system))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(evaluate, tasks))
    else:
        reports = [evaluate(config) for config in tasks]

    study = ConvergenceStudy(reports=reports, reference=reference)
    for template in schemes:
        name = template.scheme.value
        rows = study.for_scheme(name)
        study.slopes[name] = fit_slope([r.tau for r in rows], [r.e_T for r in rows])
        logger.info(f"{name}: 斜率 {study.slopes[name]}")
    return study


def delay_convergence_study(
    E: MatrixLike,
    K: MatrixLike,
    M: MatrixLike,
    exact: Callable[[float], np.ndarray],
    exact_dot: Callable[[float], np.ndarray],
    taus: Sequence[float],
    T: float,
) -> Tuple[List[float], Optional[float]]:
    """
    用制造解检验时滞 Euler 的阶

    对每个 τ 取 r_τ(t) = E ṗ(t) + K p(t) + M ṗ(t−τ)，前两层用精确值，
    误差取时间网格上的最大欧氏误差。

    Returns:
        (各 τ 的误差, 拟合斜率)
    """
    errors: List[float] = []
    for tau in taus:
        def r(t: float, tau: float = tau) -> np.ndarray:
            return E @ exact_dot(t) + K @ exact(t) + M @ exact_dot(t - tau)

        problem = DelayProblem(E=E, K=K, M=M, r=r, p0=exact(0.0), p_history=exact(-tau), p1=exact(tau))
        traj = run_delay(problem, tau, T)
        err = max(float(np.linalg.norm(v - exact(t))) for t, v in zip(traj.times, traj.values))
        logger.debug(f"时滞 Euler τ={tau:g}: 误差 {err:.3e}")
        errors.append(err)
    return errors, fit_slope(taus, errors, cutoff=math.inf)
