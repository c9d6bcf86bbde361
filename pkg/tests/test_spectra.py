import math

import numpy as np
import pytest
import scipy.sparse as sp
from numpy.testing import assert_allclose

from thermoporo_splitting.errors import DimensionMismatchError
from thermoporo_splitting.numerics import extremal_eigenvalues, extremal_singular_values
from thermoporo_splitting.problems import toy_matrix_a

SQRT2 = math.sqrt(2.0)


@pytest.mark.parametrize(
    "M, expected",
    [
        (np.diag([1.0, 5.0]), (1.0, 5.0)),
        (np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]]), (2.0 - SQRT2, 2.0 + SQRT2)),
        (toy_matrix_a(), (1.0, 3.0 + 2.0 * SQRT2)),
        (2.5 * np.eye(4), (2.5, 2.5)),
        (sp.identity(3, format="csr") * 7.0, (7.0, 7.0)),
    ],
)
def test_extremal_eigenvalues(M, expected):
    assert_allclose(extremal_eigenvalues(M), expected, rtol=1e-12)


def test_large_sparse_uses_iteration():
    values = np.concatenate([[0.5], np.linspace(1.0, 2.0, 598), [100.0]])
    M = sp.diags(values, format="csr")
    low, high = extremal_eigenvalues(M)
    assert low == pytest.approx(0.5, rel=1e-6)
    assert high == pytest.approx(100.0, rel=1e-6)


def test_eigenvalues_reject_rectangular():
    with pytest.raises(DimensionMismatchError):
        extremal_eigenvalues(np.ones((2, 3)))


class TestSingularValues:
    def test_identity(self):
        assert_allclose(extremal_singular_values(np.eye(3)), (1.0, 1.0), rtol=1e-12)

    @pytest.mark.parametrize("alpha", [0.1, 0.2, 0.62])
    def test_toy_coupling_row(self, alpha):
        # 1×3 矩阵只有一个奇异值 ‖row‖
        low, high = extremal_singular_values(alpha * np.array([[2.0, 1.0, 2.0]]))
        assert low == pytest.approx(3.0 * alpha, rel=1e-12)
        assert high == pytest.approx(3.0 * alpha, rel=1e-12)

    def test_rank_deficient(self):
        low, high = extremal_singular_values(np.diag([0.0, 2.0]))
        assert low == pytest.approx(0.0, abs=1e-14)
        assert high == pytest.approx(2.0, rel=1e-12)

    def test_matches_gram_eigenvalues(self, rng):
        M = rng.standard_normal((4, 3))
        w = np.linalg.eigvalsh(M.T @ M)
        assert_allclose(extremal_singular_values(M), (math.sqrt(w[0]), math.sqrt(w[-1])), rtol=1e-10)

    def test_sparse_input(self):
        M = sp.csr_matrix(np.array([[3.0, 0.0], [0.0, 4.0], [0.0, 0.0]]))
        assert_allclose(extremal_singular_values(M), (3.0, 4.0), rtol=1e-12)

    def test_empty(self):
        with pytest.raises(DimensionMismatchError):
            extremal_singular_values(np.zeros((0, 3)))
