"""
实验模块
误差度量、时间收敛实验和条件锐度扫描
"""

from .convergence import ConvergenceStudy, convergence_study, delay_convergence_study, midpoint_reference, reference_solution
from .metrics import ErrorReport, energy_norm, final_time_error, fit_slope, prolong
from .sharpness import (
    SWEEP_REFERENCE_TAU,
    SWEEP_TAU,
    CellClass,
    SweepCell,
    classify,
    sharpness_sweep,
    sweep_axis,
    sweep_cell,
    sweep_grid,
)

__all__ = [
    "ErrorReport",
    "energy_norm",
    "final_time_error",
    "fit_slope",
    "prolong",
    "ConvergenceStudy",
    "convergence_study",
    "delay_convergence_study",
    "midpoint_reference",
    "reference_solution",
    "CellClass",
    "SweepCell",
    "classify",
    "sharpness_sweep",
    "sweep_axis",
    "sweep_cell",
    "sweep_grid",
    "SWEEP_TAU",
    "SWEEP_REFERENCE_TAU",
]
