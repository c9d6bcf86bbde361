"""
极端特征值与奇异值

小矩阵（n ≤ 500）直接用稠密对称特征值求解；更大的矩阵用平移幂迭代求最大特征值、
用逆迭代求最小特征值，以 Rayleigh 商停滞作为停止准则。
"""

import logging
from typing import Callable, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from ..errors import DimensionMismatchError, NotSPDError
from .linalg import MatrixLike, SpdFactor, shape_of, to_dense

logger = logging.getLogger(__name__)

DENSE_LIMIT = 500
RAYLEIGH_TOL = 1e-10
MAX_ITERATIONS = 20000


def _gershgorin(M: MatrixLike) -> Tuple[float, float]:
    if sp.issparse(M):
        diag = M.diagonal()
        radius = np.asarray(abs(M).sum(axis=1)).ravel() - np.abs(diag)
    else:
        diag = np.diag(M)
        radius = np.abs(M).sum(axis=1) - np.abs(diag)
    return float((diag - radius).min()), float((diag + radius).max())


def _power_iteration(apply: Callable[[np.ndarray], np.ndarray], n: int) -> np.ndarray:
    """返回主特征向量的近似（单位向量）"""
    x = np.random.default_rng(0).standard_normal(n)
    x /= np.linalg.norm(x)
    previous = np.inf
    for _ in range(MAX_ITERATIONS):
        y = apply(x)
        quotient = float(x @ y)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return x
        x = y / norm
        if abs(quotient - previous) <= RAYLEIGH_TOL * abs(quotient):
            return x
        previous = quotient
    logger.warning(f"幂迭代在 {MAX_ITERATIONS} 步内未收敛")
    return x


def _iterative_extremes(M: MatrixLike) -> Tuple[float, float]:
    n = shape_of(M)[0]
    low, high = _gershgorin(M)
    shift = max(0.0, -low)
    v_max = _power_iteration(lambda x: M @ x + shift * x, n)
    lam_max = float(v_max @ (M @ v_max))

    try:
        factor = SpdFactor(M)
        inverse_shift = 0.0
    except NotSPDError:
        inverse_shift = low - 1e-3 * max(abs(low), abs(high), 1.0)
        factor = SpdFactor(M - inverse_shift * sp.identity(n, format="csr"))
    logger.debug(f"逆迭代平移量: {inverse_shift}")
    v_min = _power_iteration(factor.solve, n)
    lam_min = float(v_min @ (M @ v_min))
    return min(lam_min, lam_max), max(lam_min, lam_max)


def extremal_eigenvalues(M: MatrixLike) -> Tuple[float, float]:
    """
    对称矩阵的最小和最大特征值

    Args:
        M: 对称矩阵（稠密或稀疏）

    Returns:
        Tuple[float, float]: (λ_min, λ_max)
    """
    rows, cols = shape_of(M)
    if rows != cols or rows == 0:
        raise DimensionMismatchError(f"需要非空方阵，得到 {rows}x{cols}")
    if rows <= DENSE_LIMIT:
        w = scipy.linalg.eigvalsh(to_dense(M))
        return float(w[0]), float(w[-1])
    M = M.tocsr() if sp.issparse(M) else np.asarray(M, dtype=float)
    return _iterative_extremes(M)


def extremal_singular_values(M: MatrixLike) -> Tuple[float, float]:
    """
    最小和最大奇异值（共 min(m, n) 个奇异值）

    Args:
        M: 任意矩阵

    Returns:
        Tuple[float, float]: (σ_min, σ_max)
    """
    rows, cols = shape_of(M)
    if min(rows, cols) == 0:
        raise DimensionMismatchError(f"矩阵为空: {rows}x{cols}")
    if min(rows, cols) <= DENSE_LIMIT:
        s = scipy.linalg.svdvals(to_dense(M))
        return float(s.min()), float(s.max())
    gram = M @ M.T if rows <= cols else M.T @ M
    low, high = extremal_eigenvalues(gram)
    return float(np.sqrt(max(low, 0.0))), float(np.sqrt(max(high, 0.0)))
