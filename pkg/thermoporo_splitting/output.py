"""
结果输出：CSV 表、对齐的文本报告和对数坐标收敛图

所有数值按 17 位有效数字输出，相同输入得到逐字节相同的文件。
"""

import csv
import io
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from .conditions import ConditionReport
from .experiments import ConvergenceStudy, ErrorReport, SweepCell

logger = logging.getLogger(__name__)

CONVERGENCE_COLUMNS = ["scheme", "tau", "h", "e_u", "e_p", "e_theta", "e_T"]
SLOPE_COLUMNS = ["scheme", "slope"]
SWEEP_COLUMNS = ["alpha", "ctilde0", "omega", "e_T", "class"]
CONDITION_COLUMNS = [
    "mode",
    "omega_hd",
    "omega_fd",
    "relaxed_hd",
    "gamma",
    "k_min",
    "fd_precondition",
    "ellipticity_assumption",
    "hd_guaranteed",
    "fd_guaranteed",
]
TRAJECTORY_COLUMNS = ["t", "norm_u", "norm_p", "norm_theta"]


def format_value(value: Any) -> str:
    """浮点数用 %.17g，布尔值小写，其余转字符串"""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    if value is None:
        return ""
    return str(value)


def format_csv(columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> str:
    """带表头的 CSV 文本，换行统一为 \\n"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buffer.getvalue()


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> Path:
    """
    写 CSV 文件

    Raises:
        OSError: 无法写入（信息包含路径）
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = format_csv(columns, rows)
    path.write_text(text, encoding="utf-8", newline="")
    logger.info(f"已写入 {path}")
    return path


def convergence_rows(reports: Sequence[ErrorReport]) -> List[Dict[str, Any]]:
    return [
        {
            "scheme": r.scheme,
            "tau": r.tau,
            "h": r.h,
            "e_u": r.e_u,
            "e_p": r.e_p,
            "e_theta": r.e_theta,
            "e_T": r.e_T,
        }
        for r in reports
    ]


def slope_rows(slopes: Mapping[str, Optional[float]]) -> List[Dict[str, Any]]:
    return [{"scheme": name, "slope": math.nan if s is None else s} for name, s in slopes.items()]


def write_convergence(
    study: ConvergenceStudy, out_dir: Path, prefix: str = "convergence", plot: bool = True
) -> List[Path]:
    """误差表、斜率表，plot 为真时附带收敛图"""
    out_dir = Path(out_dir)
    paths = [
        write_csv(out_dir / f"{prefix}.csv", CONVERGENCE_COLUMNS, convergence_rows(study.reports)),
        write_csv(out_dir / f"{prefix}_slopes.csv", SLOPE_COLUMNS, slope_rows(study.slopes)),
    ]
    if plot:
        paths.append(write_loglog(study, out_dir / f"{prefix}.svg"))
    return paths


def write_sweep(cells: Sequence[SweepCell], path: Path) -> Path:
    return write_csv(path, SWEEP_COLUMNS, [cell.as_row() for cell in cells])


def write_conditions(reports: Sequence[ConditionReport], path: Path) -> Path:
    return write_csv(path, CONDITION_COLUMNS, [report.as_row() for report in reports])


def write_trajectory(traj, path: Path) -> Path:
    """每个时间层上 u、p、θ 的欧氏范数"""
    rows = [
        {
            "t": t,
            "norm_u": float(np.linalg.norm(s.u)),
            "norm_p": float(np.linalg.norm(s.p)),
            "norm_theta": float(np.linalg.norm(s.theta)),
        }
        for t, s in zip(traj.times, traj.states)
    ]
    return write_csv(path, TRAJECTORY_COLUMNS, rows)


def format_table(columns: Sequence[str], rows: Sequence[Mapping[str, Any]], digits: int = 6) -> str:
    """对齐的纯文本表格"""

    def cell(value: Any) -> str:
        if isinstance(value, (float, np.floating)) and not isinstance(value, bool):
            return f"{float(value):.{digits}g}"
        return format_value(value)

    body = [[cell(row.get(c)) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in body]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in body)
    return "\n".join(lines)


def format_condition_summary(report: ConditionReport) -> str:
    """条件检查的可读摘要"""
    verdict = {True: "满足", False: "不满足"}
    lines = [
        f"[{report.mode}]",
        f"  ω_HD = {report.omega_hd:.6g}  ({verdict[report.hd_guaranteed]} ω_HD ≤ 1)",
        f"  ω_FD = {report.omega_fd:.6g}  ({verdict[report.fd_guaranteed]} 全解耦条件)",
        f"  放宽条件 = {report.relaxed_hd:.6g}",
        f"  γ = {report.gamma:.6g}, K_min = {report.k_min}",
        f"  min(c_d², c_d̃²) > C_a·ĉ₀: {verdict[report.fd_precondition]}",
    ]
    if not report.ellipticity_assumption:
        lines.append("  注意: 不满足 ĉ₀ < min(c₀, c̃₀)")
    if report.relaxed_discrepancy:
        lines.append("  注意: 放宽条件与 ω_HD 的判定不一致")
    return "\n".join(lines)


def write_loglog(study: ConvergenceStudy, path: Path) -> Path:
    """每个格式一条 e_T–τ 对数折线，带参考斜率 1"""
    import matplotlib

    matplotlib.use("Agg")
    from matplotlib.figure import Figure

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig = Figure(figsize=(7, 6))
    ax = fig.subplots()
    plotted = False
    for name in study.slopes:
        rows = [r for r in study.for_scheme(name) if math.isfinite(r.e_T) and r.e_T > 0]
        if not rows:
            continue
        taus = np.array([r.tau for r in rows])
        errors = np.array([r.e_T for r in rows])
        ax.loglog(taus, errors, "o-", label=name)
        plotted = True
    if plotted:
        taus = np.array(sorted({r.tau for r in study.reports}))
        finite = [r.e_T for r in study.reports if math.isfinite(r.e_T) and r.e_T > 0]
        ax.loglog(taus, taus / taus.max() * max(finite), "k--", label="O(τ)")
        ax.legend(loc="lower right")
    ax.grid(True)
    ax.set_xlabel("τ")
    ax.set_ylabel("e_T")
    with matplotlib.rc_context({"svg.hashsalt": "thermoporo-splitting", "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    logger.info(f"已写入 {path}")
    return path
