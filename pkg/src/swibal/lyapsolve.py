"""Dense solvers for standard and generalized Lyapunov equations.

The standard equation A X + X A^T + W = 0 is solved by Schur reduction and
triangular back-substitution, with the factorization of A hoisted into a
solver object so the series method can reuse it. The generalized equation

    A X + X A^T + sum_j D_j X D_j^T + W = 0

is solved either by a dense Kronecker linearization (exact, O(n^6), small n
only) or by the fixed-point series X = sum_k X_k where X_1 absorbs W and
each later term absorbs sum_j D_j X_{k-1} D_j^T. The series converges
whenever the coupling is small against the decay of e^{At}; the
`existence_margin` diagnostic quantifies that margin.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from . import _kernels
from .exceptions import (
    DimensionTooLargeError,
    DivergedError,
    NearSingularError,
    NotHurwitzError,
    SingularKroneckerMatrixError,
)

METHOD_AUTO = "auto"
METHOD_KRONECKER = "kronecker"
METHOD_FIXEDPOINT = "fixedpoint"

_METHOD_ALIASES = {
    "auto": METHOD_AUTO,
    "kron": METHOD_KRONECKER,
    "kronecker": METHOD_KRONECKER,
    "fixedpoint": METHOD_FIXEDPOINT,
    "fixed_point": METHOD_FIXEDPOINT,
}


def _normalize_method(method: str) -> str:
    try:
        return _METHOD_ALIASES[method.strip().lower()]
    except KeyError:
        raise ValueError(
            f"unknown method {method!r}; expected one of "
            "'auto', 'kronecker', 'fixedpoint'"
        ) from None


@dataclass
class GenSolveOptions:
    """Tuning knobs for the generalized solvers.

    method selects 'kronecker', 'fixedpoint' or 'auto' (fixed point with a
    Kronecker fallback on divergence when n <= kron_cap). rel_tol stops the
    series when the last term drops below rel_tol times the accumulated
    solution norm. kron_cap bounds the dimension of the dense n^2 x n^2
    Kronecker system.
    """

    method: str = METHOD_AUTO
    rel_tol: float = 1e-12
    max_iter: int = 1000
    kron_cap: int = 64

    def __post_init__(self):
        self.method = _normalize_method(self.method)
        if not self.rel_tol > 0.0:
            raise ValueError("rel_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.kron_cap < 1:
            raise ValueError("kron_cap must be at least 1")


@dataclass
class GenSolveReport:
    """Outcome of a generalized solve: method used, iteration count (series
    method only), normalized residual, convergence verdict, and the relative
    size of the last series term."""

    method: str
    iterations: Optional[int]
    residual: float
    converged: bool
    series_tail: float


@dataclass
class ExistenceDiagnostic:
    """Margin of the sufficient existence condition
    ||sum_j D_j D_j^T||_2 < 2 alpha / beta^2, where ||e^{At}|| <= beta
    e^{-alpha t}.

    beta = 1 is exact for normal A; otherwise it is estimated by sampling
    ||e^{At}|| e^{alpha t} on a log-spaced grid and the `heuristic` flag is
    set. The diagnostic is advisory: the series solver detects divergence on
    its own.
    """

    alpha: float
    beta: float
    lhs: float
    rhs: float
    satisfied: bool
    heuristic: bool


def _symmetrize(W: np.ndarray) -> np.ndarray:
    return 0.5 * (W + W.T)


class LyapunovSolver:
    """Solver for A X + X A^T + W = 0 with the Schur factorization of A
    computed once and reused across right-hand sides."""

    def __init__(self, A: np.ndarray):
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("A must be square")
        self.A = A
        self.n = A.shape[0]
        fact, eigs = _kernels.prep_lyapunov(A)
        self._fact = fact
        self.eigenvalues = eigs
        abscissa = float(np.max(eigs.real)) if eigs.size else -np.inf
        self.spectral_abscissa = abscissa
        if abscissa >= 0.0:
            raise NotHurwitzError(
                f"A is not Hurwitz (spectral abscissa {abscissa:.6g})",
                spectral_abscissa=abscissa,
            )
        if eigs.size:
            pair_gap = float(np.min(np.abs(eigs[:, None] + eigs[None, :])))
            if pair_gap < 1e-12:
                raise NearSingularError(
                    "eigenvalue pair lambda_i + lambda_j within 1e-12 of "
                    f"zero (gap {pair_gap:.3g}); the Lyapunov operator is "
                    "near singular"
                )

    def solve(self, W: np.ndarray) -> np.ndarray:
        W = _symmetrize(np.asarray(W, dtype=float))
        if W.shape != (self.n, self.n):
            raise ValueError(f"W must be {self.n} x {self.n}")
        return _kernels.solve_lyapunov_prepped(self._fact, W)


def solve_lyapunov(A: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Solve A X + X A^T + W = 0 for Hurwitz A and symmetric W."""
    return LyapunovSolver(A).solve(W)


def _coupling_sum(D: list, X: np.ndarray) -> np.ndarray:
    out = np.zeros_like(X)
    for Dj in D:
        out += Dj @ X @ Dj.T
    return _symmetrize(out)


def residual(A: np.ndarray, D: list, W: np.ndarray, X: np.ndarray) -> float:
    """Normalized residual of the generalized equation:
    ||A X + X A^T + sum_j D_j X D_j^T + W||_F / max(1, ||W||_F)."""
    A = np.asarray(A, dtype=float)
    X = np.asarray(X, dtype=float)
    W = np.asarray(W, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or X.shape != (n, n) or W.shape != (n, n):
        raise ValueError("residual: A, W, X must all be n x n")
    R = A @ X + X @ A.T + W
    for Dj in D:
        Dj = np.asarray(Dj, dtype=float)
        if Dj.shape != (n, n):
            raise ValueError("residual: every D_j must be n x n")
        R += Dj @ X @ Dj.T
    return float(np.linalg.norm(R) / max(1.0, np.linalg.norm(W)))


def solve_generalized_kron(A: np.ndarray, D: list, W: np.ndarray,
                           kron_cap: int = 64) -> np.ndarray:
    """Solve the generalized equation via the dense Kronecker linearization
    (kron(A, I) + kron(I, A) + sum_j kron(D_j, D_j)) vec(X) = -vec(W)."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n > kron_cap:
        raise DimensionTooLargeError(
            f"n = {n} exceeds the Kronecker cap {kron_cap}; the dense "
            f"linearization would be {n * n} x {n * n}"
        )
    W = _symmetrize(np.asarray(W, dtype=float))
    eye = np.eye(n)
    M = np.kron(A, eye) + np.kron(eye, A)
    for Dj in D:
        Dj = np.asarray(Dj, dtype=float)
        M += np.kron(Dj, Dj)
    singular_msg = (
        "Kronecker linearization is singular; the generalized equation "
        "has no unique solution"
    )
    anorm = float(np.abs(M).sum(axis=0).max())
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(M)
    except scipy.linalg.LinAlgError as exc:
        raise SingularKroneckerMatrixError(singular_msg) from exc
    rcond, info = scipy.linalg.lapack.dgecon(lu, anorm)
    if info != 0 or not np.isfinite(rcond) or rcond < 1e3 * np.finfo(float).eps:
        raise SingularKroneckerMatrixError(singular_msg)
    vec = scipy.linalg.lu_solve((lu, piv), -W.reshape(n * n))
    return _symmetrize(vec.reshape(n, n))


def series_terms(A: np.ndarray, D: list, W: np.ndarray, K: int) -> list:
    """First K terms of the fixed-point series: X_1 absorbs W, later terms
    absorb the coupling of their predecessor."""
    if K < 1:
        raise ValueError("K must be at least 1")
    solver = LyapunovSolver(A)
    W = _symmetrize(np.asarray(W, dtype=float))
    terms = [solver.solve(W)]
    for _ in range(1, K):
        terms.append(solver.solve(_coupling_sum(D, terms[-1])))
    return terms


def solve_generalized_fixedpoint(A: np.ndarray, D: list, W: np.ndarray,
                                 opts: Optional[GenSolveOptions] = None):
    """Fixed-point series solve of the generalized equation.

    Returns (X, GenSolveReport). Raises DivergedError (carrying a partial
    report) when the term norms grow for 5 consecutive iterations, which is
    the practical signature of a violated existence condition.
    """
    if opts is None:
        opts = GenSolveOptions()
    solver = LyapunovSolver(A)
    W = _symmetrize(np.asarray(W, dtype=float))
    D = [np.asarray(Dj, dtype=float) for Dj in D]

    term = solver.solve(W)
    X = term.copy()
    w_norm = float(np.linalg.norm(W))
    term_norm = float(np.linalg.norm(term))
    prev_norm = term_norm
    growth_streak = 0
    iterations = 1
    term_converged = term_norm <= opts.rel_tol * max(np.linalg.norm(X),
                                                     np.finfo(float).tiny)
    if w_norm == 0.0:
        term_converged = True

    while not term_converged and iterations < opts.max_iter:
        term = solver.solve(_coupling_sum(D, term))
        X += term
        iterations += 1
        term_norm = float(np.linalg.norm(term))
        x_norm = float(np.linalg.norm(X))
        if term_norm <= opts.rel_tol * max(x_norm, np.finfo(float).tiny):
            term_converged = True
            break
        if term_norm > prev_norm:
            growth_streak += 1
        else:
            growth_streak = 0
        prev_norm = term_norm
        if growth_streak >= 5:
            tail = term_norm / max(x_norm, np.finfo(float).tiny)
            report = GenSolveReport(
                method=METHOD_FIXEDPOINT, iterations=iterations,
                residual=residual(A, D, W, X), converged=False,
                series_tail=tail,
            )
            raise DivergedError(
                f"fixed-point series diverged after {iterations} iterations "
                "(5 consecutive growing terms); the existence condition "
                "||sum_j D_j D_j^T||_2 < 2*alpha/beta^2 is likely violated "
                "(see existence_margin)",
                report=report,
            )

    x_norm = float(np.linalg.norm(X))
    tail = term_norm / max(x_norm, np.finfo(float).tiny)
    res = residual(A, D, W, X)
    a_norm = float(np.linalg.norm(solver.A))
    scale = (w_norm + 2.0 * x_norm * a_norm) / max(1.0, w_norm)
    converged = term_converged and res <= opts.rel_tol * scale
    report = GenSolveReport(
        method=METHOD_FIXEDPOINT, iterations=iterations, residual=res,
        converged=converged, series_tail=tail,
    )
    return _symmetrize(X), report


def solve_generalized(A: np.ndarray, D: list, W: np.ndarray,
                      opts: Optional[GenSolveOptions] = None):
    """Solve the generalized equation with the method chosen in opts.

    'auto' runs the series method and falls back to the Kronecker solve on
    divergence when the dimension permits. Returns (X, GenSolveReport).
    """
    if opts is None:
        opts = GenSolveOptions()
    A = np.asarray(A, dtype=float)
    n = A.shape[0]

    if opts.method == METHOD_FIXEDPOINT:
        return solve_generalized_fixedpoint(A, D, W, opts)

    if opts.method == METHOD_KRONECKER:
        X = solve_generalized_kron(A, D, W, kron_cap=opts.kron_cap)
        res = residual(A, D, W, X)
        report = GenSolveReport(
            method=METHOD_KRONECKER, iterations=None, residual=res,
            converged=res <= 1e-10, series_tail=0.0,
        )
        return X, report

    try:
        return solve_generalized_fixedpoint(A, D, W, opts)
    except DivergedError:
        if n > opts.kron_cap:
            raise
    X = solve_generalized_kron(A, D, W, kron_cap=opts.kron_cap)
    res = residual(A, D, W, X)
    report = GenSolveReport(
        method=METHOD_KRONECKER, iterations=None, residual=res,
        converged=res <= 1e-10, series_tail=0.0,
    )
    return X, report


def existence_margin(A: np.ndarray, D: list) -> ExistenceDiagnostic:
    """Evaluate the sufficient existence condition for the generalized
    equation: ||sum_j D_j D_j^T||_2 < 2 alpha / beta^2."""
    A = np.asarray(A, dtype=float)
    eigs = np.linalg.eigvals(A)
    abscissa = float(np.max(eigs.real))
    if abscissa >= 0.0:
        raise NotHurwitzError(
            f"A is not Hurwitz (spectral abscissa {abscissa:.6g})",
            spectral_abscissa=abscissa,
        )
    alpha = -abscissa
    a_norm = np.linalg.norm(A)
    commutator = np.linalg.norm(A @ A.T - A.T @ A)
    is_normal = commutator <= 1e-12 * max(1.0, a_norm * a_norm)
    if is_normal:
        beta = 1.0
        heuristic = False
    else:
        grid = np.geomspace(1e-3 / alpha, 10.0 / alpha, 64)
        beta = 1.0
        for t in grid:
            growth = np.linalg.norm(scipy.linalg.expm(A * t), 2) * np.exp(
                alpha * t)
            if growth > beta:
                beta = float(growth)
        heuristic = True
    S = np.zeros_like(A)
    for Dj in D:
        Dj = np.asarray(Dj, dtype=float)
        S += Dj @ Dj.T
    lhs = float(np.linalg.norm(_symmetrize(S), 2))
    rhs = 2.0 * alpha / (beta * beta)
    return ExistenceDiagnostic(
        alpha=alpha, beta=beta, lhs=lhs, rhs=rhs,
        satisfied=bool(lhs < rhs), heuristic=heuristic,
    )
