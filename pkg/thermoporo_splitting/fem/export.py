"""
坐标文本格式的矩阵导出（每行: row col value，17 位有效数字）
"""

import logging
from pathlib import Path
from typing import Dict, Union

import numpy as np
import scipy.sparse as sp

from ..numerics import MatrixLike

logger = logging.getLogger(__name__)


def format_coordinate(M: MatrixLike) -> str:
    """按行优先顺序输出非零元，行列号从 0 开始，首行为 % 行数 列数 非零元数"""
    coo = sp.coo_matrix(M)
    order = np.lexsort((coo.col, coo.row))
    lines = [f"% {coo.shape[0]} {coo.shape[1]} {coo.nnz}"]
    lines.extend(
        f"{coo.row[k]} {coo.col[k]} {coo.data[k]:.17g}" for k in order
    )
    return "\n".join(lines) + "\n"


def write_coordinate(M: MatrixLike, path: Union[str, Path]) -> Path:
    """写出单个矩阵"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_coordinate(M), encoding="utf-8")
    logger.debug(f"矩阵已写出: {path}")
    return path


def export_system(system, out_dir: Union[str, Path]) -> Dict[str, Path]:
    """写出系统的八个矩阵，返回 {名称: 路径}"""
    out_dir = Path(out_dir)
    names = ("A", "B", "B_tilde", "C", "C_hat", "C_tilde", "D", "D_tilde")
    written = {name: write_coordinate(getattr(system, name), out_dir / f"{name}.txt") for name in names}
    logger.info(f"已导出 {len(written)} 个矩阵到 {out_dir}")
    return written
