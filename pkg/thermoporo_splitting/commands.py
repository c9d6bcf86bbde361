"""
子命令实现

每个命令接收验证后的 RunConfig，把 CSV 写到输出目录、摘要打印到标准输出，返回退出码。
"""

import logging
import math
from pathlib import Path
from typing import List, Tuple

from .conditions import ConditionReport, condition_report
from .config import RunConfig
from .errors import RangeError
from .experiments import convergence_study, sharpness_sweep, sweep_grid
from .fem import export_system
from .model import AssembledSystem, ProblemData
from .output import (
    CONVERGENCE_COLUMNS,
    SWEEP_COLUMNS,
    convergence_rows,
    format_condition_summary,
    format_table,
    write_conditions,
    write_convergence,
    write_sweep,
    write_trajectory,
)
from .problems import preset_problem
from .steppers import SchemeConfig, SchemeId, run
from .utils.logging import LogContext
from .utils.validation import validate_step_size

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3


def build_problem(config: RunConfig, **overrides) -> Tuple[AssembledSystem, ProblemData]:
    """按配置构造问题"""
    options = config.problem.options()
    options.update(overrides)
    return preset_problem(config.problem.preset, **options)


def _check_taus(taus, T: float) -> None:
    for tau in taus:
        ok, error = validate_step_size(tau, T)
        if not ok:
            raise RangeError(error, token=str(tau))


def cmd_assemble(config: RunConfig, out_dir: Path) -> int:
    """装配并导出矩阵"""
    system, _ = build_problem(config)
    print(f"问题: {system.name}")
    print(f"  n_u = {system.n_u}, n_p = {system.n_p}, n_θ = {system.n_theta}")
    written = export_system(system, Path(out_dir) / "matrices")
    for name, path in written.items():
        print(f"  {name}: {path}")
    return EXIT_OK


def cmd_check_conditions(config: RunConfig, out_dir: Path) -> int:
    """
    打印弱耦合条件

    物理模式与谱模式并列报告。
    条件不满足只是报告，不影响退出码。
    """
    system, _ = build_problem(config)
    reports: List[ConditionReport] = [condition_report(system, mode) for mode in ("physical", "spectral")]

    print(f"问题: {system.name}")
    for report in reports:
        print(format_condition_summary(report))
    write_conditions(reports, Path(out_dir) / "conditions.csv")
    return EXIT_OK


def cmd_run(config: RunConfig, out_dir: Path) -> int:
    """用第一个步长推进每个格式并记录轨迹"""
    system, data = build_problem(config)
    T = config.problem.T or data.T
    tau = config.experiment.taus[0]
    _check_taus([tau], T)

    diverged = False
    for scheme_config in config.scheme_configs(tau):
        with LogContext(logger, f"运行 {scheme_config.scheme.value} τ={tau:g}"):
            traj = run(system, data, scheme_config)
        name = scheme_config.scheme.value
        write_trajectory(traj, Path(out_dir) / f"run_{name}.csv")
        status = f"发散（第 {traj.diverged_step} 步）" if traj.diverged else "完成"
        print(f"{name}: τ = {tau:g}, {traj.n_steps} 步, {status}, ‖x(T)‖ = {traj.final.norm():.6g}")
        diverged = diverged or traj.diverged

    if diverged and config.output.strict:
        return EXIT_DIVERGED
    return EXIT_OK


def _reference(config: RunConfig) -> SchemeConfig:
    taus = config.experiment.taus
    tau = config.experiment.reference_tau or min(taus) / 8
    return SchemeConfig(scheme=config.experiment.reference_scheme, tau=tau, T=config.problem.T)


def cmd_convergence(config: RunConfig, out_dir: Path, workers: int = 1) -> int:
    """时间收敛实验：误差表、斜率和对数图"""
    system, data = build_problem(config)
    T = config.problem.T or data.T
    taus = config.experiment.taus
    reference = _reference(config)
    _check_taus(list(taus) + [reference.tau], T)

    reference_system = reference_data = None
    if config.experiment.reference_n is not None and config.problem.preset == "geothermal":
        reference_system, reference_data = build_problem(config, n=config.experiment.reference_n)

    study = convergence_study(
        system,
        data,
        [entry.to_config(taus[0], config.problem.T) for entry in config.schemes],
        taus,
        reference,
        reference_system=reference_system,
        reference_data=reference_data,
        workers=workers,
    )
    write_convergence(study, Path(out_dir), plot=config.output.plot)

    print(format_table(CONVERGENCE_COLUMNS, convergence_rows(study.reports)))
    print()
    for name, slope in study.slopes.items():
        print(f"{name}: 斜率 = {'n/a' if slope is None else f'{slope:.4f}'}")

    diverged = any(not math.isfinite(r.e_T) for r in study.reports)
    if diverged and config.output.strict:
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_sharpness(config: RunConfig, out_dir: Path, workers: int = 1) -> int:
    """玩具问题上的条件锐度扫描"""
    rows, cols = config.experiment.grid_shape()
    alphas, ctildes = sweep_grid(rows, cols)
    scheme = SchemeId(config.experiment.sweep_scheme)
    cells = sharpness_sweep(alphas, ctildes, scheme, workers=workers)
    path = write_sweep(cells, Path(out_dir) / f"sharpness_{scheme.value}.csv")

    counts = {}
    for cell in cells:
        counts[cell.classification.value] = counts.get(cell.classification.value, 0) + 1
    print(f"{scheme.value}: {rows}×{cols} 个格点 -> {path}")
    for name in ("guaranteed", "converged", "diverged"):
        print(f"  {name}: {counts.get(name, 0)}")
    violations = [cell for cell in cells if cell.violation]
    if violations:
        print(f"  注意: {len(violations)} 个满足条件的格点 e_T ≥ 1e-2")
    if rows * cols <= 64:
        print(format_table(SWEEP_COLUMNS, [cell.as_row() for cell in cells]))
    return EXIT_OK
