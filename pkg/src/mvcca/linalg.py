"""Dense symmetric linear algebra.

Cholesky factorization, a cyclic Jacobi eigensolver for dense symmetric
matrices, and the generalized symmetric eigenproblem A v = lambda B v solved
by Cholesky whitening.  Everything runs in float64 and is deterministic:
fixed rotation order, fixed sign convention, no threading.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.linalg import solve_triangular

from .errors import DimensionMismatch, NoConvergence, NotPositiveDefinite, NotSymmetric

SYMMETRY_RTOL = 1e-12
CHOLESKY_PIVOT_MIN = 1e-300
JACOBI_MAX_SWEEPS = 100
JACOBI_OFFDIAG_RTOL = 1e-12


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending; column k of eigenvectors pairs with
    eigenvalues[k]."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_square_symmetric(M, what="matrix"):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{what} must be square, got shape {M.shape}")
    scale = np.linalg.norm(M)
    dev = np.linalg.norm(M - M.T)
    if dev > SYMMETRY_RTOL * max(scale, 1e-300) and scale > 0.0:
        raise NotSymmetric(
            f"{what} deviates from symmetry by {dev:.3e} (scale {scale:.3e})"
        )
    # rounding-level asymmetry is averaged away before solving
    return 0.5 * (M + M.T)


@njit(cache=True)
def _cholesky_kernel(M, L):
    n = M.shape[0]
    for j in range(n):
        s = M[j, j]
        for k in range(j):
            s -= L[j, k] * L[j, k]
        if s <= CHOLESKY_PIVOT_MIN:
            return j
        L[j, j] = np.sqrt(s)
        for i in range(j + 1, n):
            t = M[i, j]
            for k in range(j):
                t -= L[i, k] * L[j, k]
            L[i, j] = t / L[j, j]
    return -1


def cholesky(M):
    """Lower-triangular L with L @ L.T == M.

    Raises NotPositiveDefinite when a pivot collapses, which signals a
    singular or indefinite correlation block (callers should regularize).
    """
    Ms = _as_square_symmetric(M)
    L = np.zeros_like(Ms)
    bad = _cholesky_kernel(Ms, L)
    if bad >= 0:
        raise NotPositiveDefinite(f"pivot {bad} is not positive")
    return L


@njit(cache=True)
def _offdiag_norm(A):
    n = A.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                s += A[i, j] * A[i, j]
    return np.sqrt(s)


@njit(cache=True)
def _jacobi_kernel(A, VT, max_sweeps, tol_rel):
    # VT accumulates rotations row-wise (row k of VT = eigenvector k) so all
    # hot loops walk contiguous memory
    n = A.shape[0]
    norm_m = 0.0
    for i in range(n):
        for j in range(n):
            norm_m += A[i, j] * A[i, j]
    norm_m = np.sqrt(norm_m)
    if norm_m == 0.0:
        return 0
    for sweep in range(max_sweeps):
        if _offdiag_norm(A) <= tol_rel * norm_m:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + np.sqrt(1.0 + theta * theta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                tau = s / (1.0 + c)
                app = A[p, p]
                aqq = A[q, q]
                # two-sided rotation applied as row pass then mirrored back,
                # keeping A symmetric without strided column writes
                for i in range(n):
                    aip = A[p, i]
                    aiq = A[q, i]
                    A[p, i] = aip - s * (aiq + tau * aip)
                    A[q, i] = aiq + s * (aip - tau * aiq)
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = 0.0
                A[q, p] = 0.0
                for i in range(n):
                    if i != p and i != q:
                        A[i, p] = A[p, i]
                        A[i, q] = A[q, i]
                for i in range(n):
                    vip = VT[p, i]
                    viq = VT[q, i]
                    VT[p, i] = vip - s * (viq + tau * vip)
                    VT[q, i] = viq + s * (vip - tau * viq)
    if _offdiag_norm(A) <= tol_rel * norm_m:
        return max_sweeps
    return -1


def _fix_signs(V):
    # sign is free; pin it so the largest-magnitude entry of each column is
    # positive (first occurrence wins on ties)
    for k in range(V.shape[1]):
        col = V[:, k]
        i = int(np.argmax(np.abs(col)))
        if col[i] < 0.0:
            V[:, k] = -col
    return V


def symmetric_eigen(M):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Eigenvalues are sorted descending; eigenvectors are orthonormal columns
    with a deterministic sign convention.
    """
    A = _as_square_symmetric(M).copy()
    n = A.shape[0]
    VT = np.eye(n)
    sweeps = _jacobi_kernel(A, VT, JACOBI_MAX_SWEEPS, JACOBI_OFFDIAG_RTOL)
    if sweeps < 0:
        raise NoConvergence(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    vals = np.diag(A).copy()
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    V = np.ascontiguousarray(VT[order].T)
    return EigenDecomposition(vals, _fix_signs(V))


def generalized_symmetric_eigen(A, B):
    """Solve A v = lambda B v for symmetric A and SPD B.

    Whitens with B = L L^T, solves the standard symmetric problem on
    L^-1 A L^-T, and back-transforms v = L^-T u, so the returned vectors are
    B-orthonormal (v_j^T B v_k = delta_jk).
    """
    As = _as_square_symmetric(A, "A")
    Bs = _as_square_symmetric(B, "B")
    if As.shape != Bs.shape:
        raise DimensionMismatch(f"A is {As.shape}, B is {Bs.shape}")
    L = cholesky(Bs)
    Y = solve_triangular(L, As, lower=True)
    C = solve_triangular(L, Y.T, lower=True).T
    C = 0.5 * (C + C.T)
    inner = symmetric_eigen(C)
    V = solve_triangular(L.T, inner.eigenvectors, lower=False)
    return EigenDecomposition(inner.eigenvalues, _fix_signs(V))
