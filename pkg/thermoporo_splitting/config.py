"""
thermoporo-splitting 配置

AppConfig 读取环境变量；RunConfig 描述一次实验，文本格式为 YAML。
"""

import io
import logging
import os
from dataclasses import dataclass
from typing import Any, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_core import PydanticCustomError
from ruamel.yaml import YAML
from ruamel.yaml.error import MarkedYAMLError, YAMLError

from .errors import ConfigError, ParseError, RangeError, UnknownKeyError
from .steppers import SchemeConfig, SchemeId, StartupPolicy
from .utils.validation import (
    SCHEME_OPTION_RULES,
    parse_grid_spec,
    parse_tau_spec,
    validate_grid_spec,
    validate_scheme_options,
    validate_tau_spec,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


@dataclass
class AppConfig:
    """进程级配置"""
    log_level: str = "INFO"
    log_format: str = LOG_FORMAT
    log_file: Optional[str] = None
    out_dir: str = "out"
    workers: int = 1

    @classmethod
    def default(cls) -> "AppConfig":
        """从环境变量或默认值创建配置"""
        try:
            workers = max(1, int(os.environ.get("TPS_WORKERS", "1")))
        except ValueError:
            workers = 1
        return cls(
            log_level=os.environ.get("TPS_LOG_LEVEL", "INFO"),
            log_file=os.environ.get("TPS_LOG_FILE") or None,
            out_dir=os.environ.get("TPS_OUT_DIR", "out"),
            workers=workers,
        )


def setup_logging(config: AppConfig) -> None:
    """设置日志记录"""
    from .utils.logging import setup_logging as setup_logging_util

    setup_logging_util(
        level=config.log_level,
        log_file=config.log_file,
        format_str=config.log_format,
    )


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ProblemSection(_Section):
    """问题预设及其参数"""
    preset: Literal["geothermal", "toy"] = "geothermal"
    n: int = Field(default=8, ge=2)
    u_degree: Literal[1, 2] = 1
    T: Optional[float] = Field(default=None, gt=0)
    alpha: float = Field(default=0.2, gt=0, lt=0.64)
    c0_tilde: float = Field(default=2.0, gt=0.5, lt=5.5)

    def options(self) -> dict:
        options = {"n": self.n, "u_degree": self.u_degree, "alpha": self.alpha, "c0_tilde": self.c0_tilde}
        if self.T is not None:
            options["T"] = self.T
        return options


class SchemeEntry(_Section):
    """一个格式及其调节参数（步长由实验给出）"""
    scheme: SchemeId
    L_p: float = Field(default=0.0, ge=0)
    L_theta: float = Field(default=0.0, ge=0)
    K: int = Field(default=1, ge=1)
    sigma: float = Field(default=1.0, gt=0)
    gamma: float = Field(default=1.0, gt=0, le=1)
    startup: StartupPolicy = StartupPolicy.CONSTANT_HISTORY

    @model_validator(mode="before")
    @classmethod
    def _from_name(cls, data: Any) -> Any:
        if isinstance(data, str):
            return {"scheme": data}
        if isinstance(data, dict):
            scheme = str(getattr(data.get("scheme"), "value", data.get("scheme")))
            allowed = SCHEME_OPTION_RULES.get(scheme)
            if allowed is not None:
                # 其余未知键交给 extra="forbid"
                options = {k: v for k, v in data.items() if k != "scheme" and k in cls.model_fields}
                for key in options:
                    if key not in allowed:
                        raise PydanticCustomError(
                            "unknown_option",
                            "格式 {scheme} 不接受参数 {key}",
                            {"scheme": scheme, "key": key},
                        )
                ok, error = validate_scheme_options(scheme, options)
                if not ok:
                    raise PydanticCustomError("range", "{error}", {"error": error})
        return data

    def to_config(self, tau: float, T: Optional[float] = None) -> SchemeConfig:
        return SchemeConfig(tau=tau, T=T, **self.model_dump())


class ExperimentSection(_Section):
    """步长序列、参考解和扫描设置"""
    taus: List[float] = Field(default_factory=lambda: [0.125], min_length=1)
    reference_scheme: SchemeId = SchemeId.IMPLICIT_MIDPOINT
    reference_tau: Optional[float] = Field(default=None, gt=0)
    reference_n: Optional[int] = Field(default=None, ge=2)
    grid: str = "32x32"
    sweep_scheme: Literal["semi_explicit_half", "semi_explicit_full"] = "semi_explicit_half"
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _expand_taus(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        if "tau" in data:
            data.setdefault("taus", [data.pop("tau")])
        if "tau_spec" in data:
            spec = data.pop("tau_spec")
            ok, error = validate_tau_spec(str(spec))
            if not ok:
                raise PydanticCustomError("range", error)
            data.setdefault("taus", parse_tau_spec(str(spec)))
        return data

    @field_validator("taus")
    @classmethod
    def _positive_taus(cls, taus: List[float]) -> List[float]:
        for tau in taus:
            if not tau > 0:
                raise PydanticCustomError("range", "步长必须为正: {tau}", {"tau": tau})
        return taus

    @field_validator("grid")
    @classmethod
    def _grid(cls, grid: str) -> str:
        ok, error = validate_grid_spec(grid)
        if not ok:
            raise PydanticCustomError("range", error)
        return grid

    def grid_shape(self):
        return parse_grid_spec(self.grid)


class OutputSection(_Section):
    dir: Optional[str] = None
    strict: bool = False
    plot: bool = True


class RunConfig(_Section):
    """一次实验的完整配置"""
    problem: ProblemSection = Field(default_factory=ProblemSection)
    schemes: List[SchemeEntry] = Field(
        default_factory=lambda: [SchemeEntry(scheme=SchemeId.IMPLICIT_EULER)], min_length=1
    )
    experiment: ExperimentSection = Field(default_factory=ExperimentSection)
    output: OutputSection = Field(default_factory=OutputSection)

    @field_validator("schemes", mode="before")
    @classmethod
    def _single_scheme(cls, value: Any) -> Any:
        if isinstance(value, (str, dict)):
            return [value]
        return value

    def scheme_configs(self, tau: float) -> List[SchemeConfig]:
        return [entry.to_config(tau, self.problem.T) for entry in self.schemes]


_UNKNOWN_TYPES = {"extra_forbidden", "enum", "literal_error", "unknown_option"}
_RANGE_TYPES = {
    "greater_than",
    "greater_than_equal",
    "less_than",
    "less_than_equal",
    "too_short",
    "range",
    "value_error",
}


def _line_of(data: Any, loc) -> Optional[int]:
    """沿 loc 在 ruamel 节点中查找最深的行号（从 1 开始）"""
    line = None
    node = data
    for key in loc:
        lc = getattr(node, "lc", None)
        if lc is None:
            break
        try:
            if isinstance(node, dict) and key in node:
                line = lc.key(key)[0] + 1
                node = node[key]
            elif isinstance(node, list) and isinstance(key, int) and key < len(node):
                line = lc.item(key)[0] + 1
                node = node[key]
            else:
                break
        except (KeyError, IndexError, TypeError):
            break
    return line


def _convert_error(error: ValidationError, data: Any) -> ConfigError:
    first = error.errors()[0]
    loc = tuple(first.get("loc", ()))
    line = _line_of(data, loc)
    path = ".".join(str(p) for p in loc) or "<root>"
    kind = first.get("type", "")
    value = first.get("input")
    message = f"{path}: {first.get('msg')}"
    if kind in _UNKNOWN_TYPES:
        if kind == "extra_forbidden":
            token = str(loc[-1]) if loc else None
        elif kind == "unknown_option":
            token = str(first.get("ctx", {}).get("key"))
        else:
            token = str(value)
        return UnknownKeyError(f"{message} ({token})", line=line, token=token)
    if kind in _RANGE_TYPES:
        return RangeError(message, line=line, token=str(value))
    return ParseError(message, line=line, token=str(value))


def validate_config(data: Any) -> RunConfig:
    """
    验证已解析的配置数据

    Raises:
        ParseError / UnknownKeyError / RangeError: 带行号（若可得）
    """
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ParseError("配置的顶层必须是映射")
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise _convert_error(e, data) from None


def parse_config(text: str) -> RunConfig:
    """
    解析 YAML 配置文本

    Args:
        text: 配置文本，顶层键为 problem / schemes / experiment / output

    Returns:
        RunConfig: 验证后的配置

    Raises:
        ParseError: 文本不是合法的 YAML
        UnknownKeyError: 未知的键或格式名
        RangeError: 数值超出范围
    """
    yaml = YAML(typ="rt")
    try:
        data = yaml.load(text)
    except MarkedYAMLError as e:
        mark = e.problem_mark or e.context_mark
        raise ParseError(str(e.problem or e), line=mark.line + 1 if mark else None) from None
    except YAMLError as e:
        raise ParseError(str(e)) from None
    return validate_config(data)


def dump_config(config: RunConfig) -> str:
    """写成 YAML 文本，parse_config(dump_config(c)) == c"""
    yaml = YAML(typ="safe", pure=True)
    yaml.default_flow_style = False
    buffer = io.StringIO()
    yaml.dump(config.model_dump(mode="json", exclude_defaults=True), buffer)
    return buffer.getvalue()
