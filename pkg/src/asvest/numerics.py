"""Small dense linear-algebra and integration kernels.

Everything in this package works on matrices of dimension <= ~40, so the
decompositions are hand-rolled (Cholesky, cyclic Jacobi, LU with partial
pivoting, classical RK4) rather than delegated to LAPACK.  numpy arrays are
used as storage and for elementwise arithmetic only; the factorizations
themselves live here so that feasibility certificates can be audited in one
place.

All routines are pure functions of their inputs and safe to call
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class NonFiniteError(ValueError):
    """An input or computed quantity contains NaN or infinity."""


class NotPositiveDefiniteError(ValueError):
    """Cholesky pivot <= 0: the matrix is not positive definite."""


class SingularMatrixError(ValueError):
    """Elimination pivot fell below the singularity threshold."""


@dataclass(frozen=True)
class EigenResult:
    """Symmetric eigendecomposition, eigenvalues ascending.

    ``vectors`` has orthonormal columns; ``vectors @ diag(values) @ vectors.T``
    reconstructs the input.
    """

    values: np.ndarray
    vectors: np.ndarray


def _as_square(a, name="matrix"):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    return a


def _require_finite(a, name="input"):
    if not np.all(np.isfinite(a)):
        raise NonFiniteError(f"{name} contains non-finite entries")


def _require_symmetric(a, name="matrix"):
    if not np.array_equal(a, a.T):
        raise ValueError(f"{name} must be exactly symmetric")


def cholesky(S):
    """Lower-triangular L with L @ L.T == S for symmetric positive definite S.

    Raises NotPositiveDefiniteError as soon as a pivot is <= 0, which is the
    mechanism the synthesis layer uses to reject invalid candidate P matrices.
    """
    S = _as_square(S, "S")
    _require_finite(S, "S")
    _require_symmetric(S, "S")
    n = S.shape[0]
    L = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            s = S[i, j] - L[i, :j] @ L[j, :j]
            if i == j:
                if s <= 0.0:
                    raise NotPositiveDefiniteError(
                        f"pivot {s:.3e} at index {i} is not positive"
                    )
                L[i, i] = math.sqrt(s)
            else:
                L[i, j] = s / L[j, j]
    return L


def is_positive_definite(S):
    try:
        cholesky(S)
    except NotPositiveDefiniteError:
        return False
    return True


def sym_eigen(S, max_sweeps=50):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps until the off-diagonal Frobenius norm drops below 1e-13 times the
    Frobenius norm of the input. Unconditionally stable and plenty fast for
    the block sizes used here.
    """
    S = _as_square(S, "S")
    _require_finite(S, "S")
    _require_symmetric(S, "S")
    n = S.shape[0]
    A = S.copy()
    V = np.eye(n)
    if n == 1:
        return EigenResult(values=A[0].copy(), vectors=V)
    fro = math.sqrt(float((S * S).sum()))
    threshold = 1e-13 * fro
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * sum(A[p, q] ** 2 for p in range(n) for q in range(p + 1, n)))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # A <- J.T A J with the (p, q) Givens rotation J
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = 0.0
                A[q, p] = 0.0
                vec_p = V[:, p].copy()
                vec_q = V[:, q].copy()
                V[:, p] = c * vec_p - s * vec_q
                V[:, q] = s * vec_p + c * vec_q
    order = np.argsort(np.diag(A), kind="stable")
    return EigenResult(values=np.diag(A)[order].copy(), vectors=V[:, order].copy())


def spectral_norm(A):
    """Largest singular value, computed as sqrt(lambda_max(A.T @ A))."""
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    _require_finite(A, "A")
    if A.size == 0 or not A.any():
        return 0.0
    G = A.T @ A if A.shape[1] <= A.shape[0] else A @ A.T
    G = 0.5 * (G + G.T)
    lam = sym_eigen(G).values[-1]
    return math.sqrt(max(lam, 0.0))


def solve_linear(A, b):
    """Solve A x = b by Gaussian elimination with partial pivoting.

    ``b`` may be a vector or a matrix of right-hand-side columns.  A pivot
    smaller than 1e-14 times the Frobenius norm of A raises
    SingularMatrixError.
    """
    A = _as_square(A, "A")
    _require_finite(A, "A")
    b = np.asarray(b, dtype=float)
    _require_finite(b, "b")
    n = A.shape[0]
    vector_rhs = b.ndim == 1
    B = b.reshape(n, -1).copy()
    U = A.copy()
    scale = math.sqrt(float((A * A).sum()))
    pivot_floor = 1e-14 * max(scale, 1e-300)
    for k in range(n):
        p = k + int(np.argmax(np.abs(U[k:, k])))
        if abs(U[p, k]) < pivot_floor:
            raise SingularMatrixError(f"pivot {U[p, k]:.3e} below {pivot_floor:.3e}")
        if p != k:
            U[[k, p]] = U[[p, k]]
            B[[k, p]] = B[[p, k]]
        for i in range(k + 1, n):
            m = U[i, k] / U[k, k]
            if m != 0.0:
                U[i, k:] -= m * U[k, k:]
                B[i] -= m * B[k]
    X = np.zeros_like(B)
    for k in range(n - 1, -1, -1):
        X[k] = (B[k] - U[k, k + 1:] @ X[k + 1:]) / U[k, k]
    return X[:, 0] if vector_rhs else X


def rk4_step(f, x, t, h):
    """One classical 4th-order Runge-Kutta step of x' = f(t, x).

    The derivative is evaluated with the scipy-style signature f(t, x).
    """
    if not h > 0.0:
        raise ValueError(f"step size must be positive, got {h}")
    x = np.asarray(x, dtype=float)
    k1 = np.asarray(f(t, x), dtype=float)
    k2 = np.asarray(f(t + 0.5 * h, x + 0.5 * h * k1), dtype=float)
    k3 = np.asarray(f(t + 0.5 * h, x + 0.5 * h * k2), dtype=float)
    k4 = np.asarray(f(t + h, x + h * k3), dtype=float)
    out = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise NonFiniteError("derivative produced non-finite state")
    return out
