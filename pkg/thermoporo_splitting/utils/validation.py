"""
数据验证工具
"""

import math
import re
from typing import Any, Callable, Dict, List, Optional, Tuple

Validator = Callable[[Any], Tuple[bool, Optional[str]]]

_GRID_PATTERN = re.compile(r"^\s*(\d+)\s*[xX×]\s*(\d+)\s*$")
_TAU_PATTERN = re.compile(r"^\s*([^:]+)\s*:\s*halve\s*:\s*(\d+)\s*$")


def validate_positive(value: Any) -> Tuple[bool, Optional[str]]:
    """
    验证正的有限实数

    Args:
        value: 要验证的值

    Returns:
        Tuple[bool, Optional[str]]: (是否有效, 错误信息)
    """
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return False, "必须是数值"
    if not math.isfinite(value) or value <= 0:
        return False, f"必须是正的有限值，得到 {value}"
    return True, None


def validate_nonnegative(value: Any) -> Tuple[bool, Optional[str]]:
    """验证非负的有限实数"""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return False, "必须是数值"
    if not math.isfinite(value) or value < 0:
        return False, f"必须是非负的有限值，得到 {value}"
    return True, None


def validate_count(value: Any) -> Tuple[bool, Optional[str]]:
    """验证 ≥ 1 的整数"""
    if isinstance(value, bool) or not isinstance(value, int):
        return False, "必须是整数"
    if value < 1:
        return False, f"必须 ≥ 1，得到 {value}"
    return True, None


def validate_gamma(value: Any) -> Tuple[bool, Optional[str]]:
    """验证阻尼参数 γ ∈ (0, 1]"""
    ok, error = validate_positive(value)
    if not ok:
        return ok, error
    if value > 1:
        return False, f"γ 必须在 (0, 1] 中，得到 {value}"
    return True, None


STARTUP_POLICIES = ("constant_history", "implicit_euler_step")


def validate_startup(value: Any) -> Tuple[bool, Optional[str]]:
    """验证两步格式的启动方式"""
    if value not in STARTUP_POLICIES:
        return False, f"未知的启动方式: {value}，可选 {list(STARTUP_POLICIES)}"
    return True, None


def validate_step_size(tau: Any, final_time: Optional[float] = None) -> Tuple[bool, Optional[str]]:
    """
    验证时间步长：τ > 0，且给定 T 时 T ≥ τ 并整除

    Returns:
        Tuple[bool, Optional[str]]: (是否有效, 错误信息)
    """
    ok, error = validate_positive(tau)
    if not ok:
        return False, f"步长{error}"
    if final_time is not None:
        if final_time < tau * (1 - 1e-12):
            return False, f"终止时间 {final_time} 小于步长 {tau}"
        steps = round(final_time / tau)
        if abs(steps * tau - final_time) > 1e-9 * final_time:
            return False, f"终止时间 {final_time} 不是步长 {tau} 的整数倍"
    return True, None


def validate_grid_spec(text: str) -> Tuple[bool, Optional[str]]:
    """验证 RxC 形式的网格描述"""
    if not text:
        return False, "网格描述不能为空"
    match = _GRID_PATTERN.match(text)
    if not match:
        return False, f"网格描述必须形如 RxC: {text}"
    if int(match.group(1)) < 1 or int(match.group(2)) < 1:
        return False, f"网格行列数必须 ≥ 1: {text}"
    return True, None


def validate_tau_spec(text: str) -> Tuple[bool, Optional[str]]:
    """验证 start:halve:count 形式的步长序列"""
    if not text:
        return False, "步长描述不能为空"
    match = _TAU_PATTERN.match(text)
    if not match:
        return False, f"步长描述必须形如 start:halve:count: {text}"
    try:
        start = float(match.group(1))
    except ValueError:
        return False, f"起始步长不是数值: {match.group(1)}"
    ok, error = validate_positive(start)
    if not ok:
        return False, f"起始步长{error}"
    if int(match.group(2)) < 1:
        return False, "步长个数必须 ≥ 1"
    return True, None


def parse_grid_spec(text: str) -> Tuple[int, int]:
    """解析已验证的 RxC"""
    match = _GRID_PATTERN.match(text)
    return int(match.group(1)), int(match.group(2))


def parse_tau_spec(text: str) -> List[float]:
    """解析已验证的 start:halve:count 为步长列表"""
    match = _TAU_PATTERN.match(text)
    start, count = float(match.group(1)), int(match.group(2))
    return [start * 0.5 ** k for k in range(count)]


# 各格式允许的参数及其验证器
SCHEME_OPTION_RULES: Dict[str, Dict[str, Validator]] = {
    "implicit_euler": {},
    "implicit_midpoint": {},
    "semi_explicit_half": {},
    "semi_explicit_half_iterative": {"K": validate_count, "gamma": validate_gamma},
    "semi_explicit_full": {"startup": validate_startup},
    "sigma_splitting": {
        "sigma": validate_positive,
        "startup": validate_startup,
    },
    "hf_m_iterative": {"L_p": validate_nonnegative, "L_theta": validate_nonnegative, "K": validate_count},
    "h_f_m_iterative": {"L_p": validate_nonnegative, "L_theta": validate_nonnegative, "K": validate_count},
    "f_h_m_iterative": {"L_p": validate_nonnegative, "L_theta": validate_nonnegative, "K": validate_count},
}


def validate_scheme_options(scheme: str, options: Dict[str, Any]) -> Tuple[bool, Optional[str]]:
    """
    验证某个格式的调节参数

    Args:
        scheme: 格式名称
        options: 参数字典

    Returns:
        Tuple[bool, Optional[str]]: (是否有效, 错误信息)
    """
    if scheme not in SCHEME_OPTION_RULES:
        return False, f"未知的格式: {scheme}"
    if not isinstance(options, dict):
        return False, "参数必须是字典"

    validators = SCHEME_OPTION_RULES[scheme]
    for name, value in options.items():
        if name not in validators:
            return False, f"格式 {scheme} 不接受参数: {name}"
        is_valid, error_msg = validators[name](value)
        if not is_valid:
            return False, f"参数 {name} 无效: {error_msg}"
    return True, None
