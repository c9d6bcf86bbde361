"""
单位正方形上的结构三角网格
"""

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidSizeError


@dataclass(frozen=True)
class Mesh:
    """
    结构三角网格

    顶点编号 j·(n+1)+i 对应坐标 (i/n, j/n)；每个单元沿 (i,j)–(i+1,j+1)
    对角线剖分为两个逆时针三角形。
    """

    n: int
    vertices: np.ndarray   # (n_vertices, 2)
    triangles: np.ndarray  # (n_triangles, 3)
    boundary: np.ndarray   # (n_vertices,) bool

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    def signed_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def on_boundary(points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """坐标分量在 {0, 1} 中的点"""
    return np.any((np.abs(points) <= tol) | (np.abs(points - 1.0) <= tol), axis=1)


def build_mesh(n: int) -> Mesh:
    """
    构造 n×n 单元的结构三角网格

    Args:
        n: 每边的剖分数

    Returns:
        Mesh: 2n² 个三角形、(n+1)² 个顶点的网格

    Raises:
        InvalidSizeError: n < 1
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidSizeError(f"网格剖分数必须是正整数: {n}")

    ticks = np.linspace(0.0, 1.0, n + 1)
    xx, yy = np.meshgrid(ticks, ticks)
    vertices = np.column_stack([xx.ravel(), yy.ravel()])

    i, j = np.meshgrid(np.arange(n), np.arange(n))
    v00 = (j * (n + 1) + i).ravel()
    v10 = v00 + 1
    v01 = v00 + n + 1
    v11 = v01 + 1
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.empty((2 * n * n, 3), dtype=np.int64)
    triangles[0::2] = lower
    triangles[1::2] = upper

    return Mesh(n=int(n), vertices=vertices, triangles=triangles, boundary=on_boundary(vertices))
