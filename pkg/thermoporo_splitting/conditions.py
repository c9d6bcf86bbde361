"""
弱耦合条件

常数有两种来源：
- spectral: 由装配矩阵的极端特征值/奇异值得到
- physical: 由材料参数代入（C_d←α，C_d̃←β，c_a←μ+λ）
"""

import logging
import math
from dataclasses import asdict, dataclass
from functools import singledispatch
from typing import Any, Dict, Union

from .errors import AssumptionViolatedError, DegenerateDenominatorError, OutOfRangeError
from .model import AssembledSystem, MaterialParams
from .numerics import extremal_eigenvalues, extremal_singular_values
from .utils.logging import log_performance

logger = logging.getLogger(__name__)

MAX_INNER_ITERATIONS = 10**6


@dataclass(frozen=True)
class SpectralBounds:
    """由矩阵谱得到的椭圆性/连续性常数"""

    c_a: float
    C_a: float
    c_b: float
    C_b: float
    c_b_tilde: float
    C_b_tilde: float
    c0: float
    c0_hat: float
    c0_tilde: float
    c_d: float
    C_d: float
    c_d_tilde: float
    C_d_tilde: float
    c_blockmass: float


@dataclass(frozen=True)
class BlockBounds:
    """2×2 块算子的常数"""

    C_B: float
    c_B: float
    C_C: float
    c_C: float
    C_D: float


@dataclass(frozen=True)
class CouplingConstants:
    """条件公式实际用到的常数"""

    c_a: float
    C_a: float
    c_d: float
    C_d: float
    c_d_tilde: float
    C_d_tilde: float
    c0: float
    c0_hat: float
    c0_tilde: float


@log_performance
def spectral_bounds(system: AssembledSystem) -> SpectralBounds:
    """
    用极端特征值/奇异值确定常数

    Args:
        system: 装配后的系统

    Returns:
        SpectralBounds: 谱常数
    """
    c_a, C_a = extremal_eigenvalues(system.A)
    c_b, C_b = extremal_eigenvalues(system.B)
    c_bt, C_bt = extremal_eigenvalues(system.B_tilde)
    c_d, C_d = extremal_singular_values(system.D)
    c_dt, C_dt = extremal_singular_values(system.D_tilde)
    c_block, _ = extremal_eigenvalues(system.block_mass())
    params = system.params
    bounds = SpectralBounds(
        c_a=c_a,
        C_a=C_a,
        c_b=c_b,
        C_b=C_b,
        c_b_tilde=c_bt,
        C_b_tilde=C_bt,
        c0=params.c0,
        c0_hat=params.c0_hat,
        c0_tilde=params.c0_tilde,
        c_d=c_d,
        C_d=C_d,
        c_d_tilde=c_dt,
        C_d_tilde=C_dt,
        c_blockmass=c_block,
    )
    logger.debug(f"谱常数: {bounds}")
    return bounds


def block_bounds(sb: SpectralBounds) -> BlockBounds:
    """
    块算子常数

    Raises:
        AssumptionViolatedError: ĉ₀ ≥ min(c₀, c̃₀)
    """
    if sb.c0_hat >= min(sb.c0, sb.c0_tilde):
        raise AssumptionViolatedError(
            f"ĉ₀={sb.c0_hat} 不小于 min(c₀, c̃₀)={min(sb.c0, sb.c0_tilde)}"
        )
    return BlockBounds(
        C_B=max(sb.C_b, sb.C_b_tilde),
        c_B=min(sb.c_b, sb.c_b_tilde),
        C_C=math.sqrt(2 * sb.c0**2 + 2 * sb.c0_tilde**2),
        c_C=min(sb.c0 - sb.c0_hat, sb.c0_tilde - sb.c0_hat),
        C_D=math.hypot(sb.C_d, sb.C_d_tilde),
    )


@singledispatch
def coupling_constants(constants) -> CouplingConstants:
    raise TypeError(f"不支持的常数来源: {type(constants).__name__}")


@coupling_constants.register
def _(constants: SpectralBounds) -> CouplingConstants:
    return CouplingConstants(
        c_a=constants.c_a,
        C_a=constants.C_a,
        c_d=constants.c_d,
        C_d=constants.C_d,
        c_d_tilde=constants.c_d_tilde,
        C_d_tilde=constants.C_d_tilde,
        c0=constants.c0,
        c0_hat=constants.c0_hat,
        c0_tilde=constants.c0_tilde,
    )


@coupling_constants.register
def _(constants: MaterialParams) -> CouplingConstants:
    c_a = constants.mu + constants.lam
    return CouplingConstants(
        c_a=c_a,
        C_a=c_a,
        c_d=constants.alpha,
        C_d=constants.alpha,
        c_d_tilde=constants.beta,
        C_d_tilde=constants.beta,
        c0=constants.c0,
        c0_hat=constants.c0_hat,
        c0_tilde=constants.c0_tilde,
    )


Constants = Union[SpectralBounds, MaterialParams, CouplingConstants]


def _as_constants(constants: Constants) -> CouplingConstants:
    if isinstance(constants, CouplingConstants):
        return constants
    return coupling_constants(constants)


def _quotient(numerator: float, denominator: float, label: str) -> float:
    if not math.isfinite(denominator) or denominator <= 0.0:
        raise DegenerateDenominatorError(f"{label} 的分母非正: {denominator}")
    value = numerator / denominator
    if not math.isfinite(value):
        raise DegenerateDenominatorError(f"{label} 不是有限值")
    return value


def omega_hd(constants: Constants) -> float:
    """
    半解耦格式的耦合数 (C_d² + C_d̃²) / (c_a·min(c₀−ĉ₀, c̃₀−ĉ₀))

    Raises:
        DegenerateDenominatorError: 分母非正
    """
    k = _as_constants(constants)
    denominator = k.c_a * min(k.c0 - k.c0_hat, k.c0_tilde - k.c0_hat)
    return _quotient(k.C_d**2 + k.C_d_tilde**2, denominator, "ω_HD")


def omega_fd(constants: Constants) -> float:
    """全解耦格式的耦合数 (C_d² + C_d̃² + c_a·ĉ₀) / (c_a·min(c₀, c̃₀))"""
    k = _as_constants(constants)
    denominator = k.c_a * min(k.c0, k.c0_tilde)
    return _quotient(k.C_d**2 + k.C_d_tilde**2 + k.c_a * k.c0_hat, denominator, "ω_FD")


def fd_precondition(constants: Constants) -> bool:
    """min(c_d², c_d̃²) > C_a·ĉ₀"""
    k = _as_constants(constants)
    return min(k.c_d**2, k.c_d_tilde**2) > k.C_a * k.c0_hat


def relaxed_hd(params: MaterialParams) -> float:
    """只用物理参数的放宽条件 2·max(α², β²) / ((μ+λ)·min(c₀−ĉ₀, c̃₀−ĉ₀))"""
    denominator = (params.mu + params.lam) * min(
        params.c0 - params.c0_hat, params.c0_tilde - params.c0_hat
    )
    return _quotient(2.0 * max(params.alpha**2, params.beta**2), denominator, "relaxed ω_HD")


def min_inner_iterations(omega: float) -> int:
    """
    满足 ω^K / (2+ω)^{K−1} < 1 的最小 K ≥ 1

    Raises:
        OutOfRangeError: ω < 0 或非有限
    """
    if not math.isfinite(omega) or omega < 0:
        raise OutOfRangeError(f"ω 必须是非负有限值: {omega}")
    if omega < 1.0:
        return 1

    def satisfied(k: int) -> bool:
        return k * math.log(omega) - (k - 1) * math.log(2.0 + omega) < 0.0

    # K > log(2+ω) / log((2+ω)/ω)
    estimate = math.log(2.0 + omega) / math.log((2.0 + omega) / omega)
    k = max(1, int(math.floor(estimate)) - 1)
    while not satisfied(k):
        k += 1
        if k > MAX_INNER_ITERATIONS:
            logger.warning(f"ω={omega} 需要的内迭代次数超过上限 {MAX_INNER_ITERATIONS}")
            return MAX_INNER_ITERATIONS
    while k > 1 and satisfied(k - 1):
        k -= 1
    return k


def gamma(omega: float) -> float:
    """阻尼参数 γ = 2/(2+ω)"""
    if not math.isfinite(omega) or omega < 0:
        raise OutOfRangeError(f"ω 必须是非负有限值: {omega}")
    return 2.0 / (2.0 + omega)


@dataclass(frozen=True)
class ConditionReport:
    """条件数及判定"""

    mode: str
    omega_hd: float
    omega_fd: float
    relaxed_hd: float
    gamma: float
    k_min: int
    fd_precondition: bool
    ellipticity_assumption: bool

    @property
    def hd_guaranteed(self) -> bool:
        return self.omega_hd <= 1.0

    @property
    def fd_guaranteed(self) -> bool:
        return self.fd_precondition and self.omega_fd <= 1.0

    @property
    def relaxed_discrepancy(self) -> bool:
        """放宽条件与 ω_HD 的判定不一致"""
        return (self.relaxed_hd <= 1.0) != self.hd_guaranteed

    def as_row(self) -> Dict[str, Any]:
        row = asdict(self)
        row["hd_guaranteed"] = self.hd_guaranteed
        row["fd_guaranteed"] = self.fd_guaranteed
        return row


def _safe(formula, constants, label: str) -> float:
    try:
        return formula(constants)
    except DegenerateDenominatorError as e:
        logger.warning(f"{label} 无法计算: {e}")
        return math.inf


def condition_report(source: Union[AssembledSystem, MaterialParams], mode: str = "physical") -> ConditionReport:
    """
    计算全部条件数

    Args:
        source: 系统或材料参数（材料参数只支持 physical 模式）
        mode: "physical" 或 "spectral"

    Returns:
        ConditionReport: 报告；分母退化时对应值为 inf
    """
    params = source.params if isinstance(source, AssembledSystem) else source
    if mode == "physical":
        constants: Constants = coupling_constants(params)
    elif mode == "spectral":
        if not isinstance(source, AssembledSystem):
            raise OutOfRangeError("spectral 模式需要装配后的系统")
        constants = coupling_constants(spectral_bounds(source))
    else:
        raise OutOfRangeError(f"未知的常数模式: {mode}")

    w_hd = _safe(omega_hd, constants, "ω_HD")
    w_fd = _safe(omega_fd, constants, "ω_FD")
    finite = math.isfinite(w_hd)
    report = ConditionReport(
        mode=mode,
        omega_hd=w_hd,
        omega_fd=w_fd,
        relaxed_hd=_safe(relaxed_hd, params, "relaxed ω_HD"),
        gamma=gamma(w_hd) if finite else 0.0,
        k_min=min_inner_iterations(w_hd) if finite else MAX_INNER_ITERATIONS,
        fd_precondition=fd_precondition(constants),
        ellipticity_assumption=params.ellipticity_assumption,
    )
    logger.info(f"条件检查 ({mode}): ω_HD={report.omega_hd:.6g}, ω_FD={report.omega_fd:.6g}")
    return report
