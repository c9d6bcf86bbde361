"""
thermoporo-splitting - 热-孔隙弹性问题的耦合与解耦时间推进

提供有限元与玩具问题的装配、弱耦合条件检查、多种时间推进格式，
以及时间收敛和条件锐度实验
"""

__version__ = "0.1.0"
__author__ = "thermoporo-splitting"

# 导出主要接口
from .conditions import ConditionReport, condition_report, gamma, min_inner_iterations, omega_fd, omega_hd
from .config import AppConfig, RunConfig, dump_config, parse_config
from .errors import ThermoPoroError
from .model import AssembledSystem, MaterialParams, ProblemData, SourceTerms
from .problems import geothermal_problem, preset_problem, toy_problem
from .steppers import SchemeConfig, SchemeId, State, create_stepper, run

__all__ = [
    "AppConfig",
    "RunConfig",
    "parse_config",
    "dump_config",
    "ThermoPoroError",
    "MaterialParams",
    "SourceTerms",
    "AssembledSystem",
    "ProblemData",
    "geothermal_problem",
    "toy_problem",
    "preset_problem",
    "ConditionReport",
    "condition_report",
    "omega_hd",
    "omega_fd",
    "gamma",
    "min_inner_iterations",
    "SchemeId",
    "SchemeConfig",
    "State",
    "create_stepper",
    "run",
    "__version__",
]
