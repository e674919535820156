# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: quasi-triangular Lyapunov back-substitution on the real
Schur form, and a fixed-step RK4 segment integrator.

The Lyapunov kernel solves T X + X T^T = C for symmetric C with T quasi-upper
triangular (1x1/2x2 diagonal blocks). It sweeps block columns right to left;
within a column only the rows on or above the diagonal block are solved, the
rest following by symmetry. Coupling to already-solved columns goes through
one BLAS gemm per block column.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs
from scipy.linalg.cython_blas cimport ddot, dgemm, dgemv

cnp.import_array()


cdef int _small_solve(double* M, double* b, int s) noexcept nogil:
    """Gaussian elimination with partial pivoting for s <= 4."""
    cdef int col, r, piv, c
    cdef double best, tmp, f, inv
    for col in range(s):
        piv = col
        best = fabs(M[col * s + col])
        for r in range(col + 1, s):
            if fabs(M[r * s + col]) > best:
                best = fabs(M[r * s + col])
                piv = r
        if best == 0.0:
            return -1
        if piv != col:
            for c in range(s):
                tmp = M[col * s + c]
                M[col * s + c] = M[piv * s + c]
                M[piv * s + c] = tmp
            tmp = b[col]
            b[col] = b[piv]
            b[piv] = tmp
        inv = 1.0 / M[col * s + col]
        for r in range(col + 1, s):
            f = M[r * s + col] * inv
            if f != 0.0:
                for c in range(col, s):
                    M[r * s + c] -= f * M[col * s + c]
                b[r] -= f * b[col]
    for col in range(s - 1, -1, -1):
        tmp = b[col]
        for c in range(col + 1, s):
            tmp -= M[col * s + c] * b[c]
        b[col] = tmp / M[col * s + col]
    return 0


def trilyap_qtri(double[:, ::1] T, double[:, ::1] C):
    """Solve T X + X T^T = C with T real quasi-upper-triangular, C symmetric.

    Returns the symmetric solution X. Raises ValueError when a diagonal
    block pair yields a singular small system (eigenvalue pair summing to
    zero).
    """
    cdef Py_ssize_t n = T.shape[0]
    if C.shape[0] != n or C.shape[1] != n or T.shape[1] != n:
        raise ValueError("trilyap_qtri: shape mismatch")
    X_arr = np.zeros((n, n), dtype=np.float64)
    if n == 0:
        return X_arr
    cdef double[:, ::1] X = X_arr
    starts_arr = np.empty(n, dtype=np.intp)
    sizes_arr = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] starts = starts_arr
    cdef Py_ssize_t[::1] sizes = sizes_arr
    cdef Py_ssize_t nb = 0, k = 0
    while k < n:
        if k < n - 1 and T[k + 1, k] != 0.0:
            sizes[nb] = 2
        else:
            sizes[nb] = 1
        starts[nb] = k
        nb += 1
        k += sizes[nb - 1]

    gbuf_arr = np.empty(2 * n, dtype=np.float64)
    ybuf_arr = np.empty(2 * n, dtype=np.float64)
    rbuf_arr = np.empty(2 * n, dtype=np.float64)
    cdef double[::1] gbuf = gbuf_arr
    cdef double[::1] ybuf = ybuf_arr
    cdef double[::1] rbuf = rbuf_arr

    cdef Py_ssize_t Jb, Ib, jj, ii, i, c, d, l, row
    cdef int w, v, s, L1, L2, nmat, dlen, inc1 = 1, info
    cdef double alpha = 1.0, beta = 0.0
    cdef double Msmall[16]
    cdef double bsmall[4]
    cdef double acc
    nmat = <int> n
    info = 0

    with nogil:
        for Jb in range(nb - 1, -1, -1):
            jj = starts[Jb]
            w = <int> sizes[Jb]
            L2 = <int> (jj + w)
            L1 = <int> (n - jj - w)
            # coupling of block column J to the already-solved columns on
            # its right: the X T^T tail G[c, i] = sum_{k >= jj+w}
            # T[jj+c, k] X[i, k] and the T X tail Y[i, c] = sum_{k >= jj+w}
            # T[i, k] X[k, jj+c] (rows of solved columns via symmetry)
            if L1 > 0:
                dgemm("N", "N", &L2, &w, &L1, &alpha,
                      &X[jj + w, 0], &nmat,
                      &T[jj, jj + w], &nmat,
                      &beta, &gbuf[0], &L2)
                dgemm("T", "N", &L2, &w, &L1, &alpha,
                      &T[0, jj + w], &nmat,
                      &X[jj, jj + w], &nmat,
                      &beta, &ybuf[0], &L2)
                for c in range(w):
                    for i in range(L2):
                        rbuf[c * L2 + i] = (C[jj + c, i]
                                            - gbuf[c * L2 + i]
                                            - ybuf[c * L2 + i])
            else:
                for c in range(w):
                    for i in range(L2):
                        rbuf[c * L2 + i] = C[jj + c, i]
            # back-substitute block rows from the diagonal block upward
            for Ib in range(Jb, -1, -1):
                ii = starts[Ib]
                v = <int> sizes[Ib]
                dlen = <int> (jj + w - ii - v)
                s = v * w
                for c in range(w):
                    for i in range(v):
                        row = ii + i
                        if dlen > 0:
                            acc = ddot(&dlen, &T[row, ii + v], &inc1,
                                       &X[jj + c, ii + v], &inc1)
                        else:
                            acc = 0.0
                        bsmall[c * v + i] = rbuf[c * L2 + row] - acc
                # vec system for T_II Z + Z T_JJ^T = rhs, column stacking
                for c in range(w):
                    for i in range(v):
                        for d in range(w):
                            for l in range(v):
                                Msmall[(c * v + i) * s + (d * v + l)] = 0.0
                        for l in range(v):
                            Msmall[(c * v + i) * s + (c * v + l)] += T[ii + i, ii + l]
                        for d in range(w):
                            Msmall[(c * v + i) * s + (d * v + i)] += T[jj + c, jj + d]
                info = _small_solve(Msmall, bsmall, s)
                if info != 0:
                    break
                for c in range(w):
                    for i in range(v):
                        X[ii + i, jj + c] = bsmall[c * v + i]
                        X[jj + c, ii + i] = bsmall[c * v + i]
            if info != 0:
                break
    if info != 0:
        raise ValueError("trilyap_qtri: singular diagonal block pair "
                         "(eigenvalue pair sums to zero)")
    return X_arr


def rk4_segment(double[:, ::1] A, double[:, ::1] B, double[:, ::1] u_stages,
                double[::1] x0, double h, Py_ssize_t steps):
    """Integrate x' = A x + B u(t) with classical RK4 over one segment.

    u_stages holds the input on the half-step grid (2*steps + 1 rows).
    Returns the (steps + 1, n) state array starting with x0.
    """
    cdef Py_ssize_t n = A.shape[0]
    cdef int m = <int> B.shape[1]
    if A.shape[1] != n or B.shape[0] != n or x0.shape[0] != n:
        raise ValueError("rk4_segment: shape mismatch")
    if u_stages.shape[0] != 2 * steps + 1 or u_stages.shape[1] != m:
        raise ValueError("rk4_segment: u_stages must have 2*steps+1 rows of "
                         "width m")
    if n == 0:
        return np.empty((steps + 1, 0), dtype=np.float64)
    if m == 0:
        return rk4_segment(A, np.zeros((n, 1)), np.zeros((2 * steps + 1, 1)),
                           x0, h, steps)
    out_arr = np.empty((steps + 1, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    work_arr = np.empty((6, max(n, 1)), dtype=np.float64)
    cdef double[:, ::1] work = work_arr
    cdef double[::1] x = work[0], k1 = work[1], k2 = work[2], k3 = work[3]
    cdef double[::1] k4 = work[4], xt = work[5]
    cdef Py_ssize_t sidx, i
    cdef int nmat = <int> n, inc1 = 1
    cdef double one = 1.0, zero = 0.0, half = 0.5 * h, sixth = h / 6.0

    for i in range(n):
        x[i] = x0[i]
        out[0, i] = x0[i]

    with nogil:
        for sidx in range(steps):
            # k1 = A x + B u(t)
            dgemv("T", &nmat, &nmat, &one, &A[0, 0], &nmat, &x[0], &inc1,
                  &zero, &k1[0], &inc1)
            dgemv("T", &m, &nmat, &one, &B[0, 0], &m,
                  &u_stages[2 * sidx, 0], &inc1, &one, &k1[0], &inc1)
            for i in range(n):
                xt[i] = x[i] + half * k1[i]
            # k2 = A (x + h/2 k1) + B u(t + h/2)
            dgemv("T", &nmat, &nmat, &one, &A[0, 0], &nmat, &xt[0], &inc1,
                  &zero, &k2[0], &inc1)
            dgemv("T", &m, &nmat, &one, &B[0, 0], &m,
                  &u_stages[2 * sidx + 1, 0], &inc1, &one, &k2[0], &inc1)
            for i in range(n):
                xt[i] = x[i] + half * k2[i]
            # k3 = A (x + h/2 k2) + B u(t + h/2)
            dgemv("T", &nmat, &nmat, &one, &A[0, 0], &nmat, &xt[0], &inc1,
                  &zero, &k3[0], &inc1)
            dgemv("T", &m, &nmat, &one, &B[0, 0], &m,
                  &u_stages[2 * sidx + 1, 0], &inc1, &one, &k3[0], &inc1)
            for i in range(n):
                xt[i] = x[i] + h * k3[i]
            # k4 = A (x + h k3) + B u(t + h)
            dgemv("T", &nmat, &nmat, &one, &A[0, 0], &nmat, &xt[0], &inc1,
                  &zero, &k4[0], &inc1)
            dgemv("T", &m, &nmat, &one, &B[0, 0], &m,
                  &u_stages[2 * sidx + 2, 0], &inc1, &one, &k4[0], &inc1)
            for i in range(n):
                x[i] = x[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
                out[sidx + 1, i] = x[i]
    return out_arr
