"""
P1/P2 拉格朗日有限元空间

标量自由度：P1 为网格顶点，P2 追加每条边的中点（共享边只编号一次）。
向量空间按分量分块编号：分量 c 的标量自由度 s 对应全局编号 c·n_scalar + s。
Dirichlet 边界通过只保留内部自由度来处理。
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import InvalidSizeError
from .mesh import Mesh, on_boundary

# 参考三角形上的重心坐标梯度
_BARY_GRADS = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
_LOCAL_EDGES = np.array([[0, 1], [1, 2], [2, 0]])


def reference_basis(degree: int, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    参考三角形上的基函数值和梯度

    Args:
        degree: 1 或 2
        points: (nq, 2) 参考坐标

    Returns:
        (values (nq, nloc), grads (nq, nloc, 2))
    """
    points = np.atleast_2d(points)
    r, s = points[:, 0], points[:, 1]
    lam = np.column_stack([1.0 - r - s, r, s])
    if degree == 1:
        grads = np.broadcast_to(_BARY_GRADS, (points.shape[0], 3, 2)).copy()
        return lam, grads
    if degree != 2:
        raise InvalidSizeError(f"不支持的多项式次数: {degree}")

    values = np.empty((points.shape[0], 6))
    grads = np.empty((points.shape[0], 6, 2))
    for k in range(3):
        values[:, k] = lam[:, k] * (2.0 * lam[:, k] - 1.0)
        grads[:, k] = (4.0 * lam[:, k] - 1.0)[:, None] * _BARY_GRADS[k]
    for k, (a, b) in enumerate(_LOCAL_EDGES, start=3):
        values[:, k] = 4.0 * lam[:, a] * lam[:, b]
        grads[:, k] = 4.0 * (lam[:, b, None] * _BARY_GRADS[a] + lam[:, a, None] * _BARY_GRADS[b])
    return values, grads


@dataclass(frozen=True)
class FeSpace:
    """有限元空间"""

    mesh: Mesh
    degree: int
    components: int
    dof_coords: np.ndarray  # (n_scalar, 2)
    cell_dofs: np.ndarray   # (n_triangles, nloc)
    boundary: np.ndarray    # (n_scalar,) bool

    @property
    def n_scalar(self) -> int:
        return self.dof_coords.shape[0]

    @property
    def n_total(self) -> int:
        return self.components * self.n_scalar

    @property
    def scalar_interior(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary)

    @property
    def interior(self) -> np.ndarray:
        """所有分量的内部自由度（全局编号）"""
        inner = self.scalar_interior
        return np.concatenate([c * self.n_scalar + inner for c in range(self.components)])

    @property
    def n_dofs(self) -> int:
        """消去 Dirichlet 自由度后的维数"""
        return self.components * self.scalar_interior.size

    def restrict(self, full: np.ndarray) -> np.ndarray:
        return np.asarray(full, dtype=float)[self.interior]

    def extend(self, inner: np.ndarray) -> np.ndarray:
        full = np.zeros(self.n_total)
        full[self.interior] = inner
        return full

    def interpolate(self, func) -> np.ndarray:
        """
        在全部自由度上插值（未消去边界）

        Args:
            func: 标量空间为 f(x, y) -> 数组，向量空间返回 (u_x, u_y)
        """
        x, y = self.dof_coords[:, 0], self.dof_coords[:, 1]
        values = func(x, y)
        if self.components == 1:
            return np.broadcast_to(np.asarray(values, dtype=float), (self.n_scalar,)).copy()
        return np.concatenate(
            [np.broadcast_to(np.asarray(v, dtype=float), (self.n_scalar,)) for v in values]
        )

    def locate(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        找出点所在的三角形及其参考坐标

        Returns:
            (triangle indices, reference coordinates (npts, 2))
        """
        n = self.mesh.n
        points = np.atleast_2d(points)
        scaled = np.clip(points, 0.0, 1.0) * n
        i = np.minimum(np.floor(scaled[:, 0]).astype(np.int64), n - 1)
        j = np.minimum(np.floor(scaled[:, 1]).astype(np.int64), n - 1)
        xi = scaled[:, 0] - i
        eta = scaled[:, 1] - j
        lower = eta <= xi
        cell = 2 * (j * n + i) + np.where(lower, 0, 1)
        ref = np.where(
            lower[:, None],
            np.column_stack([xi - eta, eta]),
            np.column_stack([xi, eta - xi]),
        )
        return cell, ref

    def evaluate(self, full: np.ndarray, points: np.ndarray) -> np.ndarray:
        """
        在任意点上求有限元函数的值

        Args:
            full: 全部自由度上的系数（含边界）
            points: (npts, 2) 物理坐标

        Returns:
            标量空间返回 (npts,)，向量空间返回 (components, npts)
        """
        cell, ref = self.locate(points)
        values, _ = reference_basis(self.degree, ref)
        dofs = self.cell_dofs[cell]
        out = np.stack([
            np.sum(values * full[c * self.n_scalar + dofs], axis=1) for c in range(self.components)
        ])
        return out[0] if self.components == 1 else out


def fe_space(mesh: Mesh, degree: int, components: int = 1) -> FeSpace:
    """
    构造有限元空间

    Args:
        mesh: 结构网格
        degree: 1 或 2
        components: 1（标量）或 2（向量）
    """
    if degree not in (1, 2):
        raise InvalidSizeError(f"多项式次数必须是 1 或 2: {degree}")
    if components not in (1, 2):
        raise InvalidSizeError(f"分量数必须是 1 或 2: {components}")

    if degree == 1:
        coords = mesh.vertices
        cell_dofs = mesh.triangles
        boundary = mesh.boundary
    else:
        local = mesh.triangles[:, _LOCAL_EDGES]            # (nt, 3, 2)
        edges, inverse = np.unique(np.sort(local, axis=2).reshape(-1, 2), axis=0, return_inverse=True)
        edge_ids = np.asarray(inverse).reshape(mesh.n_triangles, 3)
        midpoints = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])
        coords = np.vstack([mesh.vertices, midpoints])
        cell_dofs = np.hstack([mesh.triangles, mesh.n_vertices + edge_ids])
        boundary = on_boundary(coords)

    return FeSpace(
        mesh=mesh,
        degree=degree,
        components=components,
        dof_coords=coords,
        cell_dofs=cell_dofs,
        boundary=boundary,
    )
