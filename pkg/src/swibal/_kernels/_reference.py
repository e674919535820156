"""Pure numpy/scipy fallback kernels.

Active when the compiled extension is unavailable or when
``SWIBAL_KERNELS=reference`` is set. The Lyapunov path works on the complex
Schur form, where the transformed coefficient is strictly triangular and each
column of the unknown reduces to one triangular solve; the factorization is
computed once per matrix and reused across right-hand sides.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg as sla

name = "reference"


def prep_lyapunov(A):
    """Factor A for repeated solves of A X + X A^T + W = 0.

    Returns an opaque factorization and the eigenvalues of A.
    """
    A = np.ascontiguousarray(A, dtype=float)
    T, U = sla.schur(A, output="complex")
    return (T, U), np.diagonal(T).copy()


def solve_lyapunov_prepped(fact, W):
    """Solve A X + X A^T + W = 0 given prep_lyapunov(A) output.

    W must be symmetric. With A = U T U^H the substitution X = U Y U^H gives
    T Y + Y T^H = -U^H W U, solved column by column from the right since T^H
    is lower triangular.
    """
    T, U = fact
    n = T.shape[0]
    C = -(U.conj().T @ W @ U)
    Y = np.zeros((n, n), dtype=complex)
    Twork = T.copy()
    diag = np.diagonal(T).copy()
    rows = np.arange(n)
    for j in range(n - 1, -1, -1):
        rhs = C[:, j]
        if j + 1 < n:
            rhs = rhs - Y[:, j + 1:] @ T[j, j + 1:].conj()
        Twork[rows, rows] = diag + T[j, j].conjugate()
        Y[:, j] = sla.solve_triangular(Twork, rhs, lower=False,
                                       check_finite=False)
    X = (U @ Y @ U.conj().T).real
    return 0.5 * (X + X.T)


def rk4_segment(A, B, u_stages, x0, h, steps):
    """Integrate x' = A x + B u(t) over one segment with classical RK4.

    u_stages holds the input at the half-step grid t0, t0+h/2, t0+h, ...
    (2*steps + 1 rows). Returns the states at the steps+1 grid points,
    starting with x0.
    """
    n = x0.shape[0]
    forcing = u_stages @ B.T
    out = np.empty((steps + 1, n))
    out[0] = x0
    x = np.array(x0, dtype=float)
    half = 0.5 * h
    sixth = h / 6.0
    for s in range(steps):
        c0 = forcing[2 * s]
        ch = forcing[2 * s + 1]
        c1 = forcing[2 * s + 2]
        k1 = A @ x + c0
        k2 = A @ (x + half * k1) + ch
        k3 = A @ (x + half * k2) + ch
        k4 = A @ (x + h * k3) + c1
        x = x + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        out[s + 1] = x
    return out
