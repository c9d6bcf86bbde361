"""
数值线性代数基础模块
"""

from .linalg import (
    LuFactor,
    MatrixLike,
    SpdFactor,
    as_sparse,
    block_matrix,
    factorize_general,
    factorize_spd,
    is_symmetric,
    solve_general,
    solve_spd,
)
from .spectra import extremal_eigenvalues, extremal_singular_values

__all__ = [
    "MatrixLike",
    "SpdFactor",
    "LuFactor",
    "as_sparse",
    "block_matrix",
    "factorize_spd",
    "factorize_general",
    "is_symmetric",
    "solve_spd",
    "solve_general",
    "extremal_eigenvalues",
    "extremal_singular_values",
]
