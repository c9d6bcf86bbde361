"""
单位正方形上的 P1/P2 有限元装配
"""

from .assembly import (
    assemble_coupling,
    assemble_elasticity,
    assemble_load,
    assemble_scalar_stiffness,
    assemble_scaled_mass,
    assemble_system,
    element_mass,
    element_stiffness,
    make_load_provider,
)
from .export import export_system, format_coordinate, write_coordinate
from .mesh import Mesh, build_mesh
from .space import FeSpace, fe_space, reference_basis

__all__ = [
    "Mesh",
    "build_mesh",
    "FeSpace",
    "fe_space",
    "reference_basis",
    "element_mass",
    "element_stiffness",
    "assemble_scaled_mass",
    "assemble_scalar_stiffness",
    "assemble_elasticity",
    "assemble_coupling",
    "assemble_load",
    "make_load_provider",
    "assemble_system",
    "format_coordinate",
    "write_coordinate",
    "export_system",
]
