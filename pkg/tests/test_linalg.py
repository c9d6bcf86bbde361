import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from thermoporo_splitting.errors import DimensionMismatchError, NotSPDError, SingularMatrixError
from thermoporo_splitting.numerics import (
    as_sparse,
    block_matrix,
    factorize_general,
    factorize_spd,
    is_symmetric,
    solve_general,
    solve_spd,
)
from thermoporo_splitting.problems import toy_matrix_a


def laplacian_1d(n: int) -> sp.csr_matrix:
    return sp.diags([-np.ones(n - 1), 2 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1], format="csr")


class TestSolveSpd:
    def test_identity(self):
        assert_allclose(solve_spd(np.eye(3), [1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])

    def test_diagonal(self):
        assert_allclose(solve_spd(np.diag([2.0, 4.0]), [2.0, 8.0]), [1.0, 2.0])

    def test_toy_matrix_against_adjugate(self):
        A = toy_matrix_a()
        x = solve_spd(A, [1.0, 0.0, 0.0])
        # tridiag(−1,2,−1)⁻¹ 的第一列为 (3, 2, 1)/4
        assert_allclose(x, (2.0 - np.sqrt(2.0)) * np.array([3.0, 2.0, 1.0]) / 4.0, rtol=1e-12)
        assert np.linalg.norm(A @ x - [1.0, 0.0, 0.0]) <= 1e-10

    def test_sparse_laplacian(self):
        M = laplacian_1d(50)
        rhs = np.linspace(-1.0, 1.0, 50)
        x = solve_spd(M, rhs)
        assert np.linalg.norm(M @ x - rhs) <= 1e-10 * np.linalg.norm(rhs)

    @pytest.mark.parametrize("M", [np.eye(2), laplacian_1d(4)])
    def test_zero_rhs(self, M):
        x = solve_spd(M, np.zeros(M.shape[0]))
        assert np.array_equal(x, np.zeros(M.shape[0]))

    def test_indefinite_rejected(self):
        with pytest.raises(NotSPDError):
            solve_spd(np.diag([1.0, -1.0]), [1.0, 1.0])

    def test_indefinite_with_positive_diagonal_rejected(self):
        with pytest.raises(NotSPDError):
            solve_spd(np.array([[1.0, 2.0], [2.0, 1.0]]), [1.0, 0.0])

    def test_sparse_indefinite_rejected(self):
        M = sp.csr_matrix(np.array([[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))
        with pytest.raises(NotSPDError):
            solve_spd(M, [1.0, 0.0, 0.0])

    def test_nonsymmetric_rejected(self):
        with pytest.raises(NotSPDError):
            solve_spd(np.array([[2.0, 1.0], [0.0, 2.0]]), [1.0, 1.0])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            solve_spd(np.eye(3), [1.0, 2.0])

    @settings(max_examples=25, deadline=None)
    @given(n=st.integers(min_value=1, max_value=12), seed=st.integers(min_value=0, max_value=10_000))
    def test_residual_on_random_spd(self, n, seed):
        rng = np.random.default_rng(seed)
        G = rng.standard_normal((n, n))
        M = G @ G.T + n * np.eye(n)
        rhs = rng.standard_normal(n)
        x = solve_spd(M, rhs)
        assert np.linalg.norm(M @ x - rhs) <= 1e-10 * np.linalg.norm(rhs)
        assert x @ (M @ x) >= 0.0


class TestSolveGeneral:
    def test_permutation(self):
        assert_allclose(solve_general(np.array([[0.0, 1.0], [1.0, 0.0]]), [3.0, 7.0]), [7.0, 3.0])

    def test_identity(self):
        assert_allclose(solve_general(np.eye(4), [1.0, -2.0, 3.0, 0.5]), [1.0, -2.0, 3.0, 0.5])

    def test_random_known_solution(self, rng):
        M = rng.standard_normal((5, 5)) + 5 * np.eye(5)
        x_known = rng.standard_normal(5)
        assert_allclose(solve_general(M, M @ x_known), x_known, rtol=1e-9, atol=1e-12)

    def test_sparse_nonsymmetric(self):
        M = sp.csr_matrix(np.array([[4.0, 1.0, 0.0], [0.0, 3.0, 2.0], [1.0, 0.0, 5.0]]))
        x_known = np.array([1.0, -1.0, 2.0])
        assert_allclose(solve_general(M, M @ x_known), x_known, rtol=1e-10)

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            solve_general(np.array([[1.0, 1.0], [1.0, 1.0]]), [1.0, 2.0])

    def test_zero_row(self):
        with pytest.raises(SingularMatrixError):
            factorize_general(np.array([[1.0, 0.0], [0.0, 0.0]]))


class TestFactorizations:
    def test_reuse_across_right_hand_sides(self):
        factor = factorize_spd(laplacian_1d(10))
        for k in range(3):
            rhs = np.full(10, float(k + 1))
            assert_allclose(factor.solve(rhs), (k + 1) * factor.solve(np.ones(10)), rtol=1e-12)

    def test_multiple_columns(self):
        factor = factorize_general(np.array([[2.0, 1.0], [1.0, 3.0]]))
        X = factor.solve(np.eye(2))
        assert_allclose(X, np.linalg.inv([[2.0, 1.0], [1.0, 3.0]]), rtol=1e-12)


@pytest.mark.parametrize(
    "M, expected",
    [
        (np.eye(3), True),
        (np.array([[1.0, 2.0], [2.0, 1.0]]), True),
        (np.array([[1.0, 2.0], [2.0 + 1e-6, 1.0]]), False),
        (np.ones((2, 3)), False),
        (laplacian_1d(5), True),
    ],
)
def test_is_symmetric(M, expected):
    assert is_symmetric(M) is expected


class TestBlockMatrix:
    def test_one_by_one_dense_blocks(self):
        M = block_matrix([[np.array([[2.0]]), -np.array([[0.5]])], [-np.array([[0.5]]), np.array([[3.0]])]])
        assert sp.issparse(M)
        assert_allclose(M.toarray(), [[2.0, -0.5], [-0.5, 3.0]])

    def test_mixed_dense_sparse_and_empty_blocks(self):
        row = np.array([[2.0, 1.0, 2.0]])
        M = block_matrix([[toy_matrix_a(), -row.T], [sp.csr_matrix(row), None]])
        assert M.shape == (4, 4)
        assert M[3, 3] == 0.0
        assert_allclose(M[:3, 3].toarray().ravel(), [-2.0, -1.0, -2.0])

    def test_mismatched_blocks(self):
        with pytest.raises(DimensionMismatchError):
            block_matrix([[np.eye(2), np.ones((3, 1))]])

    def test_as_sparse_promotes_vectors(self):
        assert as_sparse(np.array([1.0, 2.0])).shape == (1, 2)
        assert as_sparse(np.float64(3.0)).shape == (1, 1)


def test_non_finite_dense_matrix_is_singular():
    with pytest.raises(SingularMatrixError):
        factorize_general(np.array([[1.0, np.nan], [0.0, 1.0]]))
