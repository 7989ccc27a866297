import numpy as np
import pytest

from mvcca import linalg
from mvcca.errors import DimensionMismatch, NotPositiveDefinite, NotSymmetric


def random_spd(rng, n, ridge=1.0):
    G = rng.standard_normal((n, n))
    return G @ G.T + ridge * np.eye(n)


class TestCholesky:
    def test_identity(self):
        L = linalg.cholesky(np.eye(3))
        np.testing.assert_array_equal(L, np.eye(3))

    def test_two_by_two_roundtrip(self):
        M = np.array([[4.0, 2.0], [2.0, 3.0]])
        L = linalg.cholesky(M)
        np.testing.assert_allclose(L @ L.T, M, atol=1e-12)
        assert np.all(np.diag(L) > 0)
        assert np.allclose(np.triu(L, 1), 0.0)

    def test_indefinite_rejected(self):
        # determinant -3 < 0 forces a failed pivot
        with pytest.raises(NotPositiveDefinite):
            linalg.cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_spd_roundtrip_batch(self):
        rng = np.random.default_rng(42)
        for n in (2, 5, 9, 17):
            M = random_spd(rng, n)
            L = linalg.cholesky(M)
            err = np.linalg.norm(L @ L.T - M) / np.linalg.norm(M)
            assert err <= 1e-10

    def test_rejects_nonsquare_and_asymmetric(self):
        with pytest.raises(DimensionMismatch):
            linalg.cholesky(np.ones((2, 3)))
        with pytest.raises(NotSymmetric):
            linalg.cholesky(np.array([[1.0, 0.5], [0.1, 1.0]]))


class TestSymmetricEigen:
    def test_diagonal(self):
        e = linalg.symmetric_eigen(np.diag([5.0, 2.0, 7.0]))
        np.testing.assert_allclose(e.eigenvalues, [7.0, 5.0, 2.0], atol=1e-12)

    def test_exchange_matrix(self):
        e = linalg.symmetric_eigen(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(e.eigenvalues, [1.0, -1.0], atol=1e-12)
        s = 1.0 / np.sqrt(2.0)
        np.testing.assert_allclose(e.eigenvectors[:, 0], [s, s], atol=1e-12)
        np.testing.assert_allclose(np.abs(e.eigenvectors[:, 1]), [s, s], atol=1e-12)

    def test_residuals_random(self):
        rng = np.random.default_rng(1)
        M = rng.standard_normal((8, 8))
        M = M + M.T
        e = linalg.symmetric_eigen(M)
        scale = np.linalg.norm(M)
        for k in range(8):
            resid = np.linalg.norm(M @ e.eigenvectors[:, k]
                                   - e.eigenvalues[k] * e.eigenvectors[:, k])
            assert resid <= 1e-9 * scale

    def test_orthonormal_and_sorted(self):
        rng = np.random.default_rng(2)
        M = rng.standard_normal((10, 10))
        M = M + M.T
        e = linalg.symmetric_eigen(M)
        V = e.eigenvectors
        assert np.abs(V.T @ V - np.eye(10)).max() <= 1e-9
        assert np.all(np.diff(e.eigenvalues) <= 0)

    def test_sign_convention(self):
        rng = np.random.default_rng(3)
        M = rng.standard_normal((6, 6))
        M = M + M.T
        V = linalg.symmetric_eigen(M).eigenvectors
        for k in range(6):
            assert V[np.argmax(np.abs(V[:, k])), k] > 0

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        M = rng.standard_normal((7, 7))
        M = M + M.T
        a = linalg.symmetric_eigen(M)
        b = linalg.symmetric_eigen(M.copy())
        assert np.array_equal(a.eigenvalues, b.eigenvalues)
        assert np.array_equal(a.eigenvectors, b.eigenvectors)


class TestGeneralizedEigen:
    def test_identity_b(self):
        e = linalg.generalized_symmetric_eigen(np.diag([3.0, 1.0]), np.eye(2))
        np.testing.assert_allclose(e.eigenvalues, [3.0, 1.0], atol=1e-12)

    def test_a_equals_b(self):
        M = random_spd(np.random.default_rng(5), 4)
        e = linalg.generalized_symmetric_eigen(M, M)
        np.testing.assert_allclose(e.eigenvalues, np.ones(4), atol=1e-10)

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(6)
        for n in (3, 5, 8):
            A = random_spd(rng, n)
            B = random_spd(rng, n)
            e = linalg.generalized_symmetric_eigen(A, B)
            # oracle: explicit inverse, nonsymmetric eig
            ref = np.sort(np.linalg.eigvals(np.linalg.inv(B) @ A).real)[::-1]
            np.testing.assert_allclose(e.eigenvalues, ref, atol=1e-8)
            for k in range(n):
                resid = np.linalg.norm(
                    A @ e.eigenvectors[:, k]
                    - e.eigenvalues[k] * B @ e.eigenvectors[:, k])
                assert resid <= 1e-8 * np.linalg.norm(A)

    def test_b_orthonormal(self):
        rng = np.random.default_rng(7)
        A = random_spd(rng, 6)
        B = random_spd(rng, 6)
        e = linalg.generalized_symmetric_eigen(A, B)
        gram = e.eigenvectors.T @ B @ e.eigenvectors
        assert np.abs(gram - np.eye(6)).max() <= 1e-8

    def test_trace_preserved(self):
        rng = np.random.default_rng(8)
        A = random_spd(rng, 5)
        B = random_spd(rng, 5)
        e = linalg.generalized_symmetric_eigen(A, B)
        L = linalg.cholesky(B)
        Li = np.linalg.inv(L)
        ref = np.trace(Li @ A @ Li.T)
        assert abs(e.eigenvalues.sum() - ref) <= 1e-8 * abs(ref)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            linalg.generalized_symmetric_eigen(np.eye(3), np.eye(2))

    def test_singular_b_rejected(self):
        A = np.eye(2)
        B = np.array([[1.0, 1.0], [1.0, 1.0]])
        with pytest.raises(NotPositiveDefinite):
            linalg.generalized_symmetric_eigen(A, B)
