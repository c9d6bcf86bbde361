"""
半离散矩阵的装配

所有被积函数都是多项式，使用精确的对称三角形求积：
纯 P1 用 3 点（2 次精确），涉及 P2 时用 6 点（4 次精确）。
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp

from ..errors import InvalidSizeError, MeshMismatchError
from ..model import AssembledSystem, LoadProvider, MaterialParams, SourceTerms, zero_load
from ..utils.logging import log_performance
from .mesh import Mesh
from .space import FeSpace, fe_space, reference_basis

logger = logging.getLogger(__name__)

_A6, _W6A = 0.445948490915965, 0.223381589678011
_B6, _W6B = 0.091576213509771, 0.109951743655322

QUADRATURE = {
    2: (
        np.array([[1 / 6, 1 / 6], [2 / 3, 1 / 6], [1 / 6, 2 / 3]]),
        np.full(3, 1 / 6),
    ),
    4: (
        np.array([
            [_A6, _A6], [1 - 2 * _A6, _A6], [_A6, 1 - 2 * _A6],
            [_B6, _B6], [1 - 2 * _B6, _B6], [_B6, 1 - 2 * _B6],
        ]),
        0.5 * np.array([_W6A] * 3 + [_W6B] * 3),
    ),
}


def quadrature_for(*spaces: FeSpace) -> Tuple[np.ndarray, np.ndarray]:
    """参考三角形上的求积点与权重（权重之和为 1/2）"""
    exactness = 4 if any(s.degree == 2 for s in spaces) else 2
    return QUADRATURE[exactness]


@dataclass(frozen=True)
class _Geometry:
    det: np.ndarray      # (nt,)
    inv_jac: np.ndarray  # (nt, 2, 2)
    origin: np.ndarray   # (nt, 2)
    jac: np.ndarray      # (nt, 2, 2)

    def physical_points(self, ref_points: np.ndarray) -> np.ndarray:
        """(nt, nq, 2)"""
        return self.origin[:, None, :] + np.einsum("tij,qj->tqi", self.jac, ref_points)


def _geometry(mesh: Mesh) -> _Geometry:
    p = mesh.vertices[mesh.triangles]
    jac = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)
    det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
    inv_jac = np.empty_like(jac)
    inv_jac[:, 0, 0] = jac[:, 1, 1]
    inv_jac[:, 1, 1] = jac[:, 0, 0]
    inv_jac[:, 0, 1] = -jac[:, 0, 1]
    inv_jac[:, 1, 0] = -jac[:, 1, 0]
    inv_jac /= det[:, None, None]
    return _Geometry(det=det, inv_jac=inv_jac, origin=p[:, 0], jac=jac)


def _physical_grads(space: FeSpace, geo: _Geometry, points: np.ndarray) -> np.ndarray:
    """(nt, nq, nloc, 2)"""
    _, ref_grads = reference_basis(space.degree, points)
    return np.einsum("qak,tkl->tqal", ref_grads, geo.inv_jac)


def _check_same_mesh(a: FeSpace, b: FeSpace) -> None:
    if a.mesh is b.mesh:
        return
    if (
        a.mesh.n != b.mesh.n
        or not np.array_equal(a.mesh.vertices, b.mesh.vertices)
        or not np.array_equal(a.mesh.triangles, b.mesh.triangles)
    ):
        raise MeshMismatchError(f"网格不一致: n={a.mesh.n} 与 n={b.mesh.n}")


def _scatter(local: np.ndarray, row_dofs: np.ndarray, col_dofs: np.ndarray, shape: Tuple[int, int]) -> sp.csr_matrix:
    """把单元矩阵 (nt, nr, nc) 累加为全局稀疏矩阵"""
    nt, nr, nc = local.shape
    rows = np.repeat(row_dofs, nc, axis=1).ravel()
    cols = np.tile(col_dofs, (1, nr)).ravel()
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=shape).tocsr()


def _vector_dofs(space: FeSpace) -> np.ndarray:
    """向量空间单元自由度 (nt, components·nloc)，分量优先"""
    return np.hstack([c * space.n_scalar + space.cell_dofs for c in range(space.components)])


def _restrict(M: sp.csr_matrix, rows: FeSpace, cols: FeSpace, restrict: bool) -> sp.csr_matrix:
    if not restrict:
        return M
    return M[rows.interior][:, cols.interior].tocsr()


def element_mass(space: FeSpace, coeff: float = 1.0) -> np.ndarray:
    """单元质量矩阵 coeff·∫φ_a φ_b，形状 (nt, nloc, nloc)"""
    geo = _geometry(space.mesh)
    points, weights = quadrature_for(space)
    values, _ = reference_basis(space.degree, points)
    return coeff * np.einsum("q,t,qa,qb->tab", weights, geo.det, values, values)


def element_stiffness(space: FeSpace, coeff: float = 1.0) -> np.ndarray:
    """单元刚度矩阵 coeff·∫∇φ_a·∇φ_b，形状 (nt, nloc, nloc)"""
    geo = _geometry(space.mesh)
    points, weights = quadrature_for(space)
    grads = _physical_grads(space, geo, points)
    return coeff * np.einsum("q,t,tqak,tqbk->tab", weights, geo.det, grads, grads)


def assemble_scaled_mass(space: FeSpace, coeff: float, restrict: bool = True) -> sp.csr_matrix:
    """
    装配 coeff·∫ p q

    Args:
        space: 标量空间
        coeff: 系数（c₀、ĉ₀ 或 c̃₀）
        restrict: 是否只保留内部自由度
    """
    local = element_mass(space, coeff)
    M = _scatter(local, space.cell_dofs, space.cell_dofs, (space.n_scalar, space.n_scalar))
    return _restrict(M, space, space, restrict)


def assemble_scalar_stiffness(space: FeSpace, coeff: float, restrict: bool = True) -> sp.csr_matrix:
    """装配 coeff·∫ ∇p·∇q"""
    local = element_stiffness(space, coeff)
    M = _scatter(local, space.cell_dofs, space.cell_dofs, (space.n_scalar, space.n_scalar))
    return _restrict(M, space, space, restrict)


def assemble_elasticity(space: FeSpace, lam: float, mu: float, restrict: bool = True) -> sp.csr_matrix:
    """
    装配 a(u,v) = ∫ 2μ ε(u):ε(v) + λ div u div v

    对基函数 φ_a e_c 与 φ_b e_d，局部块为
    μ(δ_cd ∇φ_a·∇φ_b + ∂_dφ_a ∂_cφ_b) + λ ∂_cφ_a ∂_dφ_b。
    """
    if space.components != 2:
        raise InvalidSizeError("弹性矩阵需要二维向量空间")
    geo = _geometry(space.mesh)
    points, weights = quadrature_for(space)
    grads = _physical_grads(space, geo, points)
    dot = np.einsum("q,t,tqak,tqbk->tab", weights, geo.det, grads, grads)
    cross = np.einsum("q,t,tqac,tqbd->tabcd", weights, geo.det, grads, grads)

    nt, nloc = dot.shape[:2]
    local = np.zeros((nt, 2, nloc, 2, nloc))
    for c in range(2):
        for d in range(2):
            block = mu * cross[:, :, :, d, c] + lam * cross[:, :, :, c, d]
            if c == d:
                block = block + mu * dot
            local[:, c, :, d, :] = block
    local = local.reshape(nt, 2 * nloc, 2 * nloc)

    dofs = _vector_dofs(space)
    M = _scatter(local, dofs, dofs, (space.n_total, space.n_total))
    return _restrict(M, space, space, restrict)


def assemble_coupling(vspace: FeSpace, sspace: FeSpace, coeff: float, restrict: bool = True) -> sp.csr_matrix:
    """
    装配 D[i,j] = coeff·∫ (∇·φ_j) ψ_i

    Raises:
        MeshMismatchError: 两个空间不在同一网格上
    """
    _check_same_mesh(vspace, sspace)
    geo = _geometry(vspace.mesh)
    points, weights = quadrature_for(vspace, sspace)
    psi, _ = reference_basis(sspace.degree, points)
    grads = _physical_grads(vspace, geo, points)
    # local[t, a, d, b] = ∫ ψ_a ∂_d φ_b
    local = coeff * np.einsum("q,t,qa,tqbd->tadb", weights, geo.det, psi, grads)
    nt, ns = local.shape[:2]
    local = local.reshape(nt, ns, -1)

    M = _scatter(local, sspace.cell_dofs, _vector_dofs(vspace), (sspace.n_total, vspace.n_total))
    return _restrict(M, sspace, vspace, restrict)


def assemble_load(space: FeSpace, source, t: float, restrict: bool = True) -> np.ndarray:
    """
    装配载荷向量 ∫ s(x, y, t)·φ

    Args:
        space: 标量或向量空间
        source: s(x, y, t)；向量空间返回 (s_x, s_y)
        t: 时刻
    """
    geo = _geometry(space.mesh)
    points, weights = QUADRATURE[4]
    values, _ = reference_basis(space.degree, points)
    xq = geo.physical_points(points)
    evaluated = source(xq[..., 0], xq[..., 1], t)
    components = [evaluated] if space.components == 1 else list(evaluated)

    full = np.zeros(space.n_total)
    for c, comp in enumerate(components):
        comp = np.broadcast_to(np.asarray(comp, dtype=float), xq.shape[:2])
        local = np.einsum("q,t,tq,qa->ta", weights, geo.det, comp, values)
        full[c * space.n_scalar:(c + 1) * space.n_scalar] = np.bincount(
            space.cell_dofs.ravel(), weights=local.ravel(), minlength=space.n_scalar
        )
    return space.restrict(full) if restrict else full


def make_load_provider(space: FeSpace, source) -> LoadProvider:
    """源项为 None 时返回零载荷，否则返回按时间装配的闭包"""
    if source is None:
        return zero_load(space.n_dofs)

    def provider(t: float) -> np.ndarray:
        return assemble_load(space, source, t)

    return provider


@log_performance
def assemble_system(
    mesh: Mesh,
    params: MaterialParams,
    u_degree: int = 1,
    loads: Optional[SourceTerms] = None,
) -> AssembledSystem:
    """
    装配全部八个矩阵和载荷

    Args:
        mesh: 结构网格
        params: 材料参数
        u_degree: 位移多项式次数（压力和温度总是 P1）
        loads: 源项描述

    Returns:
        AssembledSystem: 内部自由度上的半离散系统
    """
    loads = loads or SourceTerms()
    u_space = fe_space(mesh, u_degree, components=2)
    p_space = fe_space(mesh, 1)

    mass = assemble_scaled_mass(p_space, 1.0)
    stiffness = assemble_scalar_stiffness(p_space, 1.0)
    divergence = assemble_coupling(u_space, p_space, 1.0)

    system = AssembledSystem(
        A=assemble_elasticity(u_space, params.lam, params.mu),
        B=(params.kappa_over_nu * stiffness).tocsr(),
        B_tilde=(params.kappa_tilde * stiffness).tocsr(),
        C=(params.c0 * mass).tocsr(),
        C_hat=(params.c0_hat * mass).tocsr(),
        C_tilde=(params.c0_tilde * mass).tocsr(),
        D=(params.alpha * divergence).tocsr(),
        D_tilde=(params.beta * divergence).tocsr(),
        f=make_load_provider(u_space, loads.f),
        g=make_load_provider(p_space, loads.g),
        h=make_load_provider(p_space, loads.h),
        params=params,
        mass=mass,
        u_space=u_space,
        p_space=p_space,
    )
    if not params.ellipticity_assumption:
        logger.warning(f"质量系数不满足 ĉ₀ < min(c₀, c̃₀): ĉ₀={params.c0_hat}")
    logger.info(f"装配完成: n={mesh.n}, P{u_degree}-P1-P1, n_u={system.n_u}, n_p={system.n_p}")
    return system
