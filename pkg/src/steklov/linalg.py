"""Dense symmetric eigensolvers.

The default backend is a Householder tridiagonalization followed by implicit
QL iterations with Wilkinson shifts, compiled with numba.  ``backend="lapack"``
routes to ``numpy.linalg.eigh`` instead.  Cholesky factorization and
triangular solves use LAPACK through numpy/scipy.
"""

import numpy as np
from numba import njit
from scipy import linalg as sla

from .errors import NumericalError


@njit(cache=True)
def _householder(a, want_q):
    # In-place reduction a -> Q^T a Q = tridiagonal; returns (d, e, Q).
    n = a.shape[0]
    q = np.eye(n)
    v = np.zeros(n)
    p = np.zeros(n)
    for k in range(n - 2):
        norm2 = 0.0
        for i in range(k + 1, n):
            norm2 += a[i, k] * a[i, k]
        if norm2 == 0.0:
            continue
        norm = np.sqrt(norm2)
        alpha = -norm if a[k + 1, k] >= 0 else norm
        for i in range(k + 1, n):
            v[i] = a[i, k]
        v[k + 1] -= alpha
        vn2 = norm2 - a[k + 1, k] * a[k + 1, k] + v[k + 1] * v[k + 1]
        if vn2 == 0.0:
            continue
        vn = np.sqrt(vn2)
        for i in range(k + 1, n):
            v[i] /= vn
        for i in range(k + 1, n):
            s = 0.0
            for j in range(k + 1, n):
                s += a[i, j] * v[j]
            p[i] = s
        kk = 0.0
        for i in range(k + 1, n):
            kk += v[i] * p[i]
        for i in range(k + 1, n):
            p[i] = 2.0 * (p[i] - kk * v[i])
        for i in range(k + 1, n):
            vi = v[i]
            pi = p[i]
            for j in range(k + 1, n):
                a[i, j] -= vi * p[j] + pi * v[j]
        a[k + 1, k] = alpha
        a[k, k + 1] = alpha
        for i in range(k + 2, n):
            a[i, k] = 0.0
            a[k, i] = 0.0
        if want_q:
            for r in range(n):
                s = 0.0
                for j in range(k + 1, n):
                    s += q[r, j] * v[j]
                s *= 2.0
                for j in range(k + 1, n):
                    q[r, j] -= s * v[j]
    d = np.zeros(n)
    e = np.zeros(n)
    for i in range(n):
        d[i] = a[i, i]
    for i in range(n - 1):
        e[i] = a[i + 1, i]
    return d, e, q


@njit(cache=True)
def _ql_implicit(d, e, z, want_z, max_iter):
    # Implicit QL with Wilkinson shifts on (d, e); rotations accumulate into z.
    # Returns the total iteration count, or -1 on non-convergence.
    n = d.size
    total = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) + dd == dd:
                    break
                m += 1
            if m == l:
                break
            total += 1
            if total > max_iter:
                return -1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            early = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    early = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if want_z:
                    # z holds eigenvectors as rows, so rotations stay contiguous
                    for k in range(z.shape[1]):
                        f = z[i + 1, k]
                        z[i + 1, k] = s * z[i, k] + c * f
                        z[i, k] = c * z[i, k] - s * f
                i -= 1
            if early:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return total


def _check_square(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def is_symmetric(A, tol=1e-8):
    A = np.asarray(A)
    scale = max(np.abs(A).max(initial=0.0), 1e-300)
    return np.abs(A - A.T).max(initial=0.0) <= tol * scale


def tridiagonalize(A):
    """Householder reduction A = Q T Q^T; returns (diagonal, subdiagonal, Q)."""
    A = _check_square(A)
    d, e, q = _householder(np.array(A, dtype=float, order="C"), True)
    return d, e[:-1], q


def sym_eig(A, vectors=True, backend="native"):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix."""
    A = _check_square(A)
    if not is_symmetric(A):
        raise ValueError("matrix is not symmetric to 1e-8 relative")
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    if backend == "lapack":
        if vectors:
            return np.linalg.eigh(A)
        return np.linalg.eigvalsh(A)
    if backend != "native":
        raise ValueError(f"unknown backend {backend!r}")
    if n == 0:
        return (np.zeros(0), np.zeros((0, 0))) if vectors else np.zeros(0)
    d, e, q = _householder(np.array(A, order="C"), vectors)
    z = np.ascontiguousarray(q.T) if vectors else np.zeros((1, 1))
    it = _ql_implicit(d, e, z, vectors, 30 * max(n, 1))
    if it < 0:
        raise NumericalError("implicit QL did not converge within 30N iterations")
    order = np.argsort(d, kind="stable")
    if vectors:
        return d[order], np.ascontiguousarray(z[order].T)
    return d[order]


def cholesky(B):
    """Lower-triangular L with B = L L^T."""
    B = _check_square(B)
    try:
        return np.linalg.cholesky(0.5 * (B + B.T))
    except np.linalg.LinAlgError as exc:
        raise NumericalError("Cholesky factorization failed: matrix is not positive definite") from exc


def gen_sym_eig(A, B, vectors=False, backend="native"):
    """Solve A v = lambda B v for symmetric A and symmetric positive definite B."""
    A = _check_square(A)
    if not is_symmetric(A) or not is_symmetric(B):
        raise ValueError("A and B must be symmetric")
    L = cholesky(B)
    X = sla.solve_triangular(L, A, lower=True)
    C = sla.solve_triangular(L, X.T, lower=True)
    C = 0.5 * (C + C.T)
    if not vectors:
        return sym_eig(C, vectors=False, backend=backend)
    w, Y = sym_eig(C, vectors=True, backend=backend)
    return w, sla.solve_triangular(L.T, Y, lower=False)


def operator_norm_2(A):
    """Spectral norm: square root of the top eigenvalue of A^T A."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0
    G = A.T @ A
    w = sym_eig(0.5 * (G + G.T), vectors=False)
    return float(np.sqrt(max(w[-1], 0.0)))
