"""Compiled kernel backend: real Schur reduction plus the Cython
back-substitution and RK4 kernels."""

import numpy as np
from scipy.linalg import schur

from . import _fast

name = "compiled"


def _qtri_eigenvalues(T: np.ndarray) -> np.ndarray:
    """Eigenvalues of a real quasi-upper-triangular matrix from its 1x1 and
    2x2 diagonal blocks."""
    n = T.shape[0]
    eigs = np.empty(n, dtype=complex)
    k = 0
    while k < n:
        if k < n - 1 and T[k + 1, k] != 0.0:
            a, b = T[k, k], T[k, k + 1]
            c, d = T[k + 1, k], T[k + 1, k + 1]
            half_tr = 0.5 * (a + d)
            disc = half_tr * half_tr - (a * d - b * c)
            if disc < 0.0:
                im = np.sqrt(-disc)
                eigs[k] = half_tr + 1j * im
                eigs[k + 1] = half_tr - 1j * im
            else:
                rt = np.sqrt(disc)
                eigs[k] = half_tr + rt
                eigs[k + 1] = half_tr - rt
            k += 2
        else:
            eigs[k] = T[k, k]
            k += 1
    return eigs


def prep_lyapunov(A: np.ndarray):
    """Factor A once for repeated Lyapunov solves. Returns (factorization,
    eigenvalues of A)."""
    T, U = schur(np.asarray(A, dtype=float), output="real")
    T = np.ascontiguousarray(T)
    U = np.ascontiguousarray(U)
    return (T, U), _qtri_eigenvalues(T)


def solve_lyapunov_prepped(fact, W: np.ndarray) -> np.ndarray:
    """Solve A X + X A^T + W = 0 for symmetric W using a prepared
    factorization of A."""
    T, U = fact
    C = -U.T @ W @ U
    C = np.ascontiguousarray(0.5 * (C + C.T))
    Y = _fast.trilyap_qtri(T, C)
    X = U @ Y @ U.T
    return 0.5 * (X + X.T)


def rk4_segment(A: np.ndarray, B: np.ndarray, u_stages: np.ndarray,
                x0: np.ndarray, h: float, steps: int) -> np.ndarray:
    return _fast.rk4_segment(
        np.ascontiguousarray(A, dtype=float),
        np.ascontiguousarray(B, dtype=float),
        np.ascontiguousarray(u_stages, dtype=float),
        np.ascontiguousarray(x0, dtype=float),
        float(h), int(steps),
    )
