"""
thermoporo-splitting 命令行入口点
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from .commands import (
    EXIT_CONFIG,
    EXIT_ERROR,
    cmd_assemble,
    cmd_check_conditions,
    cmd_convergence,
    cmd_run,
    cmd_sharpness,
)
from .config import AppConfig, RunConfig, parse_config, setup_logging, validate_config
from .errors import ConfigError, ThermoPoroError
from .steppers import SchemeId, StartupPolicy, get_available_schemes
from .utils.validation import SCHEME_OPTION_RULES, parse_tau_spec, validate_grid_spec, validate_tau_spec

logger = logging.getLogger(__name__)

EPILOG = """
示例:
  # 地热问题的弱耦合条件
  python -m thermoporo_splitting check-conditions --preset geothermal

  # 两个格式的时间收敛实验（6 个步长）
  python -m thermoporo_splitting convergence --schemes implicit_euler,semi_explicit_half --tau 0.125:halve:6

  # 玩具问题上 8×8 的条件锐度扫描
  python -m thermoporo_splitting sharpness --grid 8x8 --scheme semi_explicit_full

  # 从配置文件运行
  python -m thermoporo_splitting run --config run.yaml --out results

环境变量:
  TPS_LOG_LEVEL    日志级别
  TPS_LOG_FILE     日志文件
  TPS_OUT_DIR      默认输出目录
  TPS_WORKERS      默认并行线程数
"""

# CLI 选项名 -> 格式参数名
_KNOB_FLAGS = {"sigma": "sigma", "Lp": "L_p", "Ltheta": "L_theta", "K": "K", "gamma": "gamma", "startup": "startup"}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", "-c", type=str, help="YAML 配置文件")
    parser.add_argument("--preset", choices=["geothermal", "toy"], help="预设问题")
    parser.add_argument("--out", "-o", type=str, help="输出目录 (默认: $TPS_OUT_DIR 或 out)")
    parser.add_argument("--n", type=int, help="地热问题每边剖分数")
    parser.add_argument("--u-degree", type=int, choices=[1, 2], help="位移多项式次数")
    parser.add_argument("--T", type=float, help="终止时间")
    parser.add_argument("--alpha", type=float, help="玩具问题的 α")
    parser.add_argument("--ctilde0", type=float, help="玩具问题的 c̃₀")
    parser.add_argument(
        "--log-level",
        "-l",
        type=str,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="日志级别 (默认: $TPS_LOG_LEVEL 或 INFO)",
    )


def _add_schemes(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scheme", "--schemes", dest="schemes", type=str, help="格式名，多个用逗号分隔")
    parser.add_argument("--tau", type=str, help="步长：单个值或 start:halve:count")
    parser.add_argument("--sigma", type=float, help="σ 分裂参数")
    parser.add_argument("--Lp", type=float, help="压力稳定化参数 L_p")
    parser.add_argument("--Ltheta", type=float, help="温度稳定化参数 L_θ")
    parser.add_argument("--K", type=int, help="内迭代次数")
    parser.add_argument("--gamma", type=float, help="阻尼参数 γ")
    parser.add_argument("--startup", choices=[p.value for p in StartupPolicy], help="两步格式的启动方式")
    parser.add_argument("--strict", action="store_true", help="发散时返回退出码 3")
    parser.add_argument("--workers", type=int, help="并行线程数")


def build_parser() -> argparse.ArgumentParser:
    """构造命令行解析器"""
    parser = argparse.ArgumentParser(
        prog="thermoporo-splitting",
        description="thermoporo-splitting - 热-孔隙弹性耦合/解耦时间推进",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    parser.add_argument("--version", "-v", action="store_true", help="显示版本信息")
    parser.add_argument("--list-schemes", action="store_true", help="列出所有可用的格式")
    sub = parser.add_subparsers(dest="command")

    assemble = sub.add_parser("assemble", help="装配并导出矩阵")
    _add_common(assemble)

    check = sub.add_parser("check-conditions", help="计算弱耦合条件")
    _add_common(check)

    run = sub.add_parser("run", help="用单个步长推进格式")
    _add_common(run)
    _add_schemes(run)

    convergence = sub.add_parser("convergence", help="时间收敛实验")
    _add_common(convergence)
    _add_schemes(convergence)
    convergence.add_argument("--reference-tau", type=float, help="参考解步长 (默认: τ_min/8)")
    convergence.add_argument("--reference-n", type=int, help="参考解网格剖分数")

    sharpness = sub.add_parser("sharpness", help="玩具问题的条件锐度扫描")
    _add_common(sharpness)
    _add_schemes(sharpness)
    sharpness.add_argument("--grid", type=str, help="扫描网格 RxC (默认: 32x32)")
    return parser


def _parse_taus(text: str) -> List[float]:
    ok, _ = validate_tau_spec(text)
    if ok:
        return parse_tau_spec(text)
    try:
        return [float(text)]
    except ValueError:
        raise ConfigError(f"步长必须是数值或 start:halve:count: {text}", token=text) from None


def _knobs_from_args(args) -> Dict[str, Any]:
    return {
        name: getattr(args, flag)
        for flag, name in _KNOB_FLAGS.items()
        if getattr(args, flag, None) is not None
    }


def _apply_knobs(entry: Dict[str, Any], knobs: Dict[str, Any]) -> Dict[str, Any]:
    allowed = SCHEME_OPTION_RULES.get(str(entry.get("scheme")), {})
    entry = dict(entry)
    for name, value in knobs.items():
        if name in allowed:
            entry[name] = value
        else:
            logger.warning(f"格式 {entry.get('scheme')} 不使用参数 {name}，已忽略")
    return entry


def create_config_from_args(args) -> RunConfig:
    """配置文件打底，命令行参数覆盖"""
    if getattr(args, "config", None):
        text = Path(args.config).read_text(encoding="utf-8")
        base = parse_config(text)
    else:
        base = RunConfig()
    data = base.model_dump(mode="json", exclude_defaults=True)
    problem = data.setdefault("problem", {})
    experiment = data.setdefault("experiment", {})
    output = data.setdefault("output", {})

    for flag, key in (("preset", "preset"), ("n", "n"), ("u_degree", "u_degree"), ("T", "T"),
                      ("alpha", "alpha"), ("ctilde0", "c0_tilde")):
        value = getattr(args, flag, None)
        if value is not None:
            problem[key] = value

    if getattr(args, "command", None) == "sharpness":
        problem["preset"] = "toy"
        if args.schemes:
            experiment["sweep_scheme"] = args.schemes.split(",")[0].strip()
        if args.grid:
            ok, error = validate_grid_spec(args.grid)
            if not ok:
                raise ConfigError(error, token=args.grid)
            experiment["grid"] = args.grid
    elif getattr(args, "schemes", None):
        data["schemes"] = [{"scheme": name.strip()} for name in args.schemes.split(",") if name.strip()]

    if getattr(args, "tau", None):
        experiment["taus"] = _parse_taus(args.tau)
    if getattr(args, "reference_tau", None) is not None:
        experiment["reference_tau"] = args.reference_tau
    if getattr(args, "reference_n", None) is not None:
        experiment["reference_n"] = args.reference_n
    if getattr(args, "workers", None) is not None:
        experiment["workers"] = args.workers
    if getattr(args, "strict", False):
        output["strict"] = True

    knobs = _knobs_from_args(args)
    if knobs and "schemes" not in data:
        data["schemes"] = [{"scheme": SchemeId.IMPLICIT_EULER.value}]
    if knobs:
        data["schemes"] = [_apply_knobs(entry, knobs) for entry in data["schemes"]]
    return validate_config(data)


def list_schemes() -> None:
    """列出所有可用的格式"""
    print("\n" + "=" * 50)
    print("可用的时间推进格式")
    print("=" * 50)
    for name, description in get_available_schemes().items():
        print(f"  {name}: {description}")
    print("=" * 50)


def show_version() -> None:
    """显示版本信息"""
    from . import __version__

    print(f"\nthermoporo-splitting v{__version__}")
    print("热-孔隙弹性问题的耦合与解耦时间推进")


def main(argv: Optional[List[str]] = None) -> int:
    """主函数"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.version:
        show_version()
        return 0
    if args.list_schemes:
        list_schemes()
        return 0
    if not args.command:
        parser.print_help()
        return EXIT_CONFIG

    app = AppConfig.default()
    if args.log_level:
        app.log_level = args.log_level
    setup_logging(app)

    try:
        config = create_config_from_args(args)
        out_dir = Path(args.out or config.output.dir or app.out_dir)
        workers = args.workers if getattr(args, "workers", None) else max(config.experiment.workers, app.workers)
        if args.command == "assemble":
            return cmd_assemble(config, out_dir)
        if args.command == "check-conditions":
            return cmd_check_conditions(config, out_dir)
        if args.command == "run":
            return cmd_run(config, out_dir)
        if args.command == "convergence":
            return cmd_convergence(config, out_dir, workers)
        if args.command == "sharpness":
            return cmd_sharpness(config, out_dir, workers)
    except ConfigError as e:
        print(f"配置错误: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ThermoPoroError, OSError) as e:
        print(f"错误: {e}", file=sys.stderr)
        return EXIT_ERROR
    except KeyboardInterrupt:
        print("\n已中断", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        logger.debug("未预期的异常", exc_info=True)
        print(f"错误: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
