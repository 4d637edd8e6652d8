import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from stokes_flow.sparse import (
    NoConvergence,
    SingularMatrix,
    Triplet,
    factorize,
    from_coo,
    from_triplets,
    residual_norm,
    solve_linear,
)


def poisson1d(n):
    return sp.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(n, n), format="csr")


class TestAssembly:
    def test_duplicates_summed(self):
        A = from_triplets([Triplet(0, 0, 1.0), Triplet(0, 0, 2.5), Triplet(1, 0, -1.0)], 2, 2)
        np.testing.assert_array_equal(A.toarray(), [[3.5, 0.0], [-1.0, 0.0]])

    def test_out_of_range_names_entry(self):
        with pytest.raises(IndexError, match=r"\(2, 0\)"):
            from_coo([2], [0], [1.0], (2, 2))

    def test_empty(self):
        assert from_triplets([], 3, 3).nnz == 0

    @given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4), st.floats(-10, 10)), max_size=40))
    def test_matches_dense_accumulation(self, trip):
        dense = np.zeros((5, 5))
        for r, c, v in trip:
            dense[r, c] += v
        np.testing.assert_allclose(from_triplets(trip, 5, 5).toarray(), dense, atol=1e-12)


class TestSolve:
    def test_poisson_1d(self):
        n = 50
        A = poisson1d(n)
        x_true = np.sin(np.linspace(0, 3, n))
        rep = solve_linear(A, A @ x_true)
        np.testing.assert_allclose(rep.solution, x_true, atol=1e-10)
        assert rep.relative_residual < 1e-12

    def test_residual_norm(self):
        A = sp.identity(3, format="csr")
        assert residual_norm(A, [1, 2, 3], [1, 2, 5]) == pytest.approx(2.0)
        with pytest.raises(ValueError):
            residual_norm(A, [1, 2], [1, 2, 3])

    def test_singular_reported(self):
        A = sp.csr_matrix(np.array([[1.0, 1.0], [1.0, 1.0]]))
        with pytest.raises(SingularMatrix) as exc:
            solve_linear(A, np.array([1.0, 0.0]))
        assert exc.value.residual > 1e-10

    def test_zero_matrix_singular(self):
        with pytest.raises(SingularMatrix):
            solve_linear(sp.csr_matrix((3, 3)), np.ones(3))

    def test_iterative(self):
        A = poisson1d(40) + sp.identity(40)
        b = np.ones(40)
        rep = solve_linear(A, b, method="iterative")
        assert rep.method_tag == "gmres+ilu"
        assert rep.relative_residual <= 1e-10

    def test_iterative_gives_up(self):
        A = sp.csr_matrix(np.array([[1.0, 1.0], [1.0, 1.0]]))
        with pytest.raises((NoConvergence, SingularMatrix)):
            solve_linear(A, np.array([1.0, 0.0]), method="iterative", maxiter=3)

    @pytest.mark.parametrize("kw", [{"tol": 0}, {"method": "magic"}])
    def test_bad_arguments(self, kw):
        with pytest.raises(ValueError):
            solve_linear(sp.identity(2), np.ones(2), **kw)

    def test_shape_checks(self):
        with pytest.raises(ValueError):
            solve_linear(sp.csr_matrix((2, 3)), np.ones(2))
        with pytest.raises(ValueError):
            solve_linear(sp.identity(2), np.ones(3))

    def test_factorization_reused(self):
        A = poisson1d(20)
        lu = factorize(A)
        for k in range(3):
            b = np.arange(20.0) ** k
            assert lu(b).relative_residual < 1e-12

    @given(arrays(np.float64, (8, 8), elements=st.floats(-1, 1)), arrays(np.float64, 8, elements=st.floats(-1, 1)))
    def test_diagonally_dominant_certified(self, R, b):
        A = sp.csr_matrix(R + np.diag(np.abs(R).sum(axis=1) + 1.0))
        rep = solve_linear(A, b)
        assert np.linalg.norm(A @ rep.solution - b) <= 1e-10 * max(np.linalg.norm(b), 1e-300)
