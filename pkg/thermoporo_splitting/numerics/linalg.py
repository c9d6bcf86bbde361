"""
线性求解器

稠密矩阵用 LAPACK 分解，稀疏矩阵用 SuperLU 分解。分解对象在构造后不再修改，
可以在多个时间步之间重复使用。
"""

import logging
from typing import Optional, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import DimensionMismatchError, NotSPDError, SingularMatrixError

logger = logging.getLogger(__name__)

MatrixLike = Union[np.ndarray, sp.spmatrix, sp.sparray]

SYMMETRY_RTOL = 1e-12
RESIDUAL_TOL = 1e-10
MAX_REFINEMENTS = 3


def shape_of(M: MatrixLike) -> tuple:
    return tuple(M.shape)


def to_dense(M: MatrixLike) -> np.ndarray:
    """转换为稠密 ndarray"""
    if sp.issparse(M):
        return M.toarray()
    return np.asarray(M, dtype=float)


def as_sparse(M: MatrixLike) -> sp.csr_matrix:
    """稠密或稀疏矩阵统一为 CSR（一维、零维输入按单行处理）"""
    if sp.issparse(M):
        return sp.csr_matrix(M)
    return sp.csr_matrix(np.atleast_2d(np.asarray(M, dtype=float)))


def block_matrix(blocks) -> sp.csr_matrix:
    """
    按块拼装 CSR 矩阵，块可以是稠密 ndarray、稀疏矩阵或 None

    Raises:
        DimensionMismatchError: 块的行列数对不上
    """
    rows = [[None if b is None else as_sparse(b) for b in row] for row in blocks]
    try:
        return sp.bmat(rows, format="csr")
    except ValueError as e:
        raise DimensionMismatchError(f"块矩阵维度不一致: {e}") from e


def is_symmetric(M: MatrixLike, rtol: float = SYMMETRY_RTOL) -> bool:
    """
    检查 |M[i,j] − M[j,i]| ≤ rtol·max|M|

    Args:
        M: 方阵
        rtol: 相对容差

    Returns:
        bool: 是否对称
    """
    rows, cols = shape_of(M)
    if rows != cols:
        return False
    if sp.issparse(M):
        scale = abs(M).max() if M.nnz else 0.0
        diff = abs(M - M.T)
        worst = diff.max() if diff.nnz else 0.0
    else:
        A = np.asarray(M, dtype=float)
        scale = np.abs(A).max() if A.size else 0.0
        worst = np.abs(A - A.T).max() if A.size else 0.0
    return bool(worst <= rtol * scale)


def _check_system(M: MatrixLike, rhs: Optional[np.ndarray] = None) -> None:
    rows, cols = shape_of(M)
    if rows != cols:
        raise DimensionMismatchError(f"矩阵不是方阵: {rows}x{cols}")
    if rows == 0:
        raise DimensionMismatchError("矩阵为空")
    if rhs is not None and rhs.shape[0] != rows:
        raise DimensionMismatchError(f"右端项长度 {rhs.shape[0]} 与矩阵维度 {rows} 不一致")


def _row_absmax(M: MatrixLike) -> np.ndarray:
    if sp.issparse(M):
        return np.asarray(abs(M).max(axis=1).toarray()).ravel()
    return np.abs(M).max(axis=1)


def _col_scale(v: np.ndarray, s: np.ndarray) -> np.ndarray:
    return s.reshape((-1,) + (1,) * (v.ndim - 1)) * v


def _relative_residual(M: MatrixLike, x: np.ndarray, rhs: np.ndarray) -> float:
    scale = np.linalg.norm(rhs)
    if scale == 0.0:
        return float(np.linalg.norm(x))
    return float(np.linalg.norm(M @ x - rhs) / scale)


class _Factorization:
    """分解基类：负责缩放、残差检查和迭代修正"""

    def __init__(self, M: MatrixLike):
        _check_system(M)
        self.matrix = M.tocsr() if sp.issparse(M) else np.asarray(M, dtype=float)
        self.n = shape_of(M)[0]

    def _solve_scaled(self, rhs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """
        求解 M x = rhs

        Args:
            rhs: 右端项，一维或二维（多列）

        Returns:
            np.ndarray: 解
        """
        rhs = np.asarray(rhs, dtype=float)
        _check_system(self.matrix, rhs)
        if not np.any(rhs):
            return np.zeros_like(rhs)

        x = self._solve_scaled(rhs)
        residual = _relative_residual(self.matrix, x, rhs)
        refinements = 0
        while residual > RESIDUAL_TOL and refinements < MAX_REFINEMENTS:
            x = x + self._solve_scaled(rhs - self.matrix @ x)
            residual = _relative_residual(self.matrix, x, rhs)
            refinements += 1
        if not np.all(np.isfinite(x)):
            raise SingularMatrixError("求解结果包含非有限值")
        if residual > RESIDUAL_TOL:
            logger.warning(f"迭代修正 {refinements} 次后相对残差仍为 {residual:.3e}")
        return x


class SpdFactor(_Factorization):
    """
    对称正定矩阵分解

    先做对称 Jacobi 缩放 S·M·S，稠密矩阵用 Cholesky，稀疏矩阵用对角主元的
    对称模式 LU，并检查全部主元为正。
    """

    def __init__(self, M: MatrixLike):
        super().__init__(M)
        if not is_symmetric(self.matrix):
            raise NotSPDError("矩阵不对称")

        diag = self.matrix.diagonal() if sp.issparse(self.matrix) else np.diag(self.matrix)
        if np.any(diag <= 0.0) or not np.all(np.isfinite(diag)):
            raise NotSPDError("对角元非正")
        self.scaling = 1.0 / np.sqrt(diag)

        if sp.issparse(self.matrix):
            S = sp.diags(self.scaling)
            scaled = (S @ self.matrix @ S).tocsc()
            try:
                self._lu = spla.splu(
                    scaled,
                    permc_spec="MMD_AT_PLUS_A",
                    diag_pivot_thresh=0.0,
                    options={"SymmetricMode": True},
                )
            except RuntimeError as e:
                raise NotSPDError(f"稀疏分解失败: {e}") from e
            pivots = self._lu.U.diagonal()
            if np.any(pivots <= 0.0):
                raise NotSPDError("分解中出现非正主元")
            self._cho = None
        else:
            scaled = self.scaling[:, None] * self.matrix * self.scaling[None, :]
            try:
                self._cho = scipy.linalg.cho_factor(scaled, lower=True, check_finite=True)
            except (np.linalg.LinAlgError, ValueError) as e:
                raise NotSPDError(f"Cholesky 分解失败: {e}") from e
            self._lu = None

    def _solve_scaled(self, rhs: np.ndarray) -> np.ndarray:
        b = _col_scale(rhs, self.scaling)
        y = self._lu.solve(b) if self._lu is not None else scipy.linalg.cho_solve(self._cho, b)
        return _col_scale(y, self.scaling)


class LuFactor(_Factorization):
    """一般方阵的 LU 分解（行列平衡后部分主元）"""

    def __init__(self, M: MatrixLike):
        super().__init__(M)
        row = _row_absmax(self.matrix)
        if np.any(row == 0.0):
            raise SingularMatrixError("矩阵存在零行")
        self.row_scaling = 1.0 / row
        if sp.issparse(self.matrix):
            scaled_rows = sp.diags(self.row_scaling) @ self.matrix
            col = np.asarray(abs(scaled_rows).max(axis=0).toarray()).ravel()
        else:
            scaled_rows = self.row_scaling[:, None] * self.matrix
            col = np.abs(scaled_rows).max(axis=0)
        if np.any(col == 0.0):
            raise SingularMatrixError("矩阵存在零列")
        self.col_scaling = 1.0 / col

        if sp.issparse(self.matrix):
            scaled = (scaled_rows @ sp.diags(self.col_scaling)).tocsc()
            try:
                self._lu = spla.splu(scaled)
            except RuntimeError as e:
                raise SingularMatrixError(f"稀疏 LU 分解失败: {e}") from e
            pivots = np.abs(self._lu.U.diagonal())
            self._dense = None
        else:
            scaled = scaled_rows * self.col_scaling[None, :]
            try:
                self._dense = scipy.linalg.lu_factor(scaled, check_finite=True)
            except (np.linalg.LinAlgError, ValueError) as e:
                raise SingularMatrixError(f"LU 分解失败: {e}") from e
            pivots = np.abs(np.diag(self._dense[0]))
            self._lu = None
        if pivots.min() <= self.n * np.finfo(float).eps * pivots.max():
            raise SingularMatrixError("矩阵数值奇异")

    def _solve_scaled(self, rhs: np.ndarray) -> np.ndarray:
        b = _col_scale(rhs, self.row_scaling)
        if self._lu is not None:
            y = self._lu.solve(b)
        else:
            y = scipy.linalg.lu_solve(self._dense, b)
        return _col_scale(y, self.col_scaling)


def factorize_spd(M: MatrixLike) -> SpdFactor:
    """分解对称正定矩阵"""
    return SpdFactor(M)


def factorize_general(M: MatrixLike) -> LuFactor:
    """分解一般方阵"""
    return LuFactor(M)


def solve_spd(M: MatrixLike, rhs: np.ndarray) -> np.ndarray:
    """
    求解对称正定系统 M x = rhs

    Args:
        M: 对称正定矩阵
        rhs: 右端项

    Returns:
        np.ndarray: 解向量；rhs 为零时返回零向量

    Raises:
        NotSPDError: 矩阵不对称或出现非正主元
        DimensionMismatchError: 维度不一致
    """
    rhs = np.asarray(rhs, dtype=float)
    _check_system(M, rhs)
    if not np.any(rhs):
        return np.zeros_like(rhs)
    return SpdFactor(M).solve(rhs)


def solve_general(M: MatrixLike, rhs: np.ndarray) -> np.ndarray:
    """
    求解一般线性系统 M x = rhs

    Raises:
        SingularMatrixError: 矩阵奇异
        DimensionMismatchError: 维度不一致
    """
    rhs = np.asarray(rhs, dtype=float)
    _check_system(M, rhs)
    if not np.any(rhs):
        return np.zeros_like(rhs)
    return LuFactor(M).solve(rhs)
