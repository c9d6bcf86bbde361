"""
异常类型定义
"""

from typing import Optional


class ThermoPoroError(Exception):
    """所有库异常的基类"""


# 线性代数
class NotSPDError(ThermoPoroError):
    """矩阵不是对称正定的（非正主元或迭代停滞）"""


class SingularMatrixError(ThermoPoroError):
    """矩阵奇异，无法求解"""


class DimensionMismatchError(ThermoPoroError, ValueError):
    """维度不一致"""


# 网格与有限元
class InvalidSizeError(ThermoPoroError, ValueError):
    """网格尺寸无效"""


class MeshMismatchError(ThermoPoroError, ValueError):
    """两个有限元空间不在同一网格上"""


# 问题与条件
class InvalidParameterError(ThermoPoroError, ValueError):
    """材料参数无效"""


class OutOfRangeError(ThermoPoroError, ValueError):
    """参数超出允许范围"""


class AssumptionViolatedError(ThermoPoroError):
    """质量系数不满足 ĉ₀ < min(c₀, c̃₀)"""


class DegenerateDenominatorError(ThermoPoroError):
    """条件公式分母非正或非有限"""


# 时间推进
class DivergedError(ThermoPoroError):
    """时间推进发散"""

    def __init__(self, message: str, step: Optional[int] = None):
        super().__init__(message)
        self.step = step


# 实验
class NegativeQuadraticFormError(ThermoPoroError):
    """二次型 vᵀMv 为负，矩阵不是半正定的"""


class ZeroReferenceError(ThermoPoroError):
    """参考解范数为零，无法计算相对误差"""


# 配置
class ConfigError(ThermoPoroError):
    """配置错误基类，带可选行号和出错的标记"""

    def __init__(self, message: str, line: Optional[int] = None, token: Optional[str] = None):
        self.line = line
        self.token = token
        if line is not None:
            message = f"第 {line} 行: {message}"
        super().__init__(message)


class ParseError(ConfigError):
    """配置文本格式错误"""


class UnknownKeyError(ConfigError):
    """未知的键或名称"""


class RangeError(ConfigError, ValueError):
    """配置值超出范围"""
