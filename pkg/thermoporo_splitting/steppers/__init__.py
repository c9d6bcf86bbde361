"""
时间推进模块
支持全耦合、半显式和迭代耦合格式，以及抽象时滞方程的 Euler 步进
"""

from typing import Dict, Type

from ..model import AssembledSystem
from .base import SchemeConfig, SchemeId, StartupPolicy, State, StepResult, Stepper, Trajectory
from .coupled import ImplicitEulerStepper, ImplicitMidpointStepper, step_implicit_euler, step_implicit_midpoint
from .decoupled import (
    SemiExplicitFullStepper,
    SemiExplicitHalfIterativeStepper,
    SemiExplicitHalfStepper,
    SigmaSplittingStepper,
    step_semi_explicit_full,
    step_semi_explicit_half,
    step_semi_explicit_half_iterative,
    step_sigma_splitting,
)
from .delay import DelayEulerStepper, DelayProblem, DelayTrajectory, reduce_to_delay_problem, run_delay, step_delay_euler
from .iterative import (
    FHMIterativeStepper,
    HFMIterativeStepper,
    HfMIterativeStepper,
    step_f_h_m_iterative,
    step_h_f_m_iterative,
    step_hf_m_iterative,
)

_STEPPER_MAP: Dict[SchemeId, Type[Stepper]] = {
    SchemeId.IMPLICIT_EULER: ImplicitEulerStepper,
    SchemeId.IMPLICIT_MIDPOINT: ImplicitMidpointStepper,
    SchemeId.SEMI_EXPLICIT_HALF: SemiExplicitHalfStepper,
    SchemeId.SEMI_EXPLICIT_HALF_ITERATIVE: SemiExplicitHalfIterativeStepper,
    SchemeId.SEMI_EXPLICIT_FULL: SemiExplicitFullStepper,
    SchemeId.SIGMA_SPLITTING: SigmaSplittingStepper,
    SchemeId.HF_M_ITERATIVE: HfMIterativeStepper,
    SchemeId.H_F_M_ITERATIVE: HFMIterativeStepper,
    SchemeId.F_H_M_ITERATIVE: FHMIterativeStepper,
}


def create_stepper(config: SchemeConfig, system: AssembledSystem) -> Stepper:
    """
    创建步进器实例

    Args:
        config: 格式配置
        system: 装配后的系统

    Returns:
        Stepper: 已完成矩阵分解的步进器
    """
    stepper_class = _STEPPER_MAP.get(SchemeId(config.scheme))
    if not stepper_class:
        raise ValueError(f"不支持的格式: {config.scheme}")
    return stepper_class(system, config)


def get_available_schemes() -> dict:
    """获取可用的格式列表"""
    return {
        scheme.value: (stepper_class.__doc__ or stepper_class.__name__).strip().splitlines()[0]
        for scheme, stepper_class in _STEPPER_MAP.items()
    }


from .runner import initial_state, n_steps, run  # noqa: E402

__all__ = [
    "SchemeId",
    "StartupPolicy",
    "SchemeConfig",
    "State",
    "StepResult",
    "Stepper",
    "Trajectory",
    "create_stepper",
    "get_available_schemes",
    "run",
    "initial_state",
    "n_steps",
    "step_implicit_euler",
    "step_implicit_midpoint",
    "step_semi_explicit_half",
    "step_semi_explicit_half_iterative",
    "step_semi_explicit_full",
    "step_sigma_splitting",
    "step_hf_m_iterative",
    "step_h_f_m_iterative",
    "step_f_h_m_iterative",
    "step_delay_euler",
    "DelayProblem",
    "DelayTrajectory",
    "DelayEulerStepper",
    "run_delay",
    "reduce_to_delay_problem",
]
