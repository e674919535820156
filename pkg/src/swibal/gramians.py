"""Generalized Gramians of switched systems and range-based reachability
and observability analysis.

The reachability Gramian P solves

    A P + P A^T + sum_j (D_j P D_j^T + B_j B_j^T) = 0

with A and D_j from the bilinear embedding; the observability Gramian is
its exact dual (transpose the modes and swap B with C). Ranges of these
Gramians are the reachable and observable subspaces, so rank decisions and
subspace comparisons reduce to eigendecompositions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import NotHurwitzError
from .lyapsolve import (
    GenSolveOptions,
    GenSolveReport,
    solve_generalized,
    solve_lyapunov,
)
from .model import LssModel, bilinear_embed

KIND_REACHABILITY = "reachability"
KIND_OBSERVABILITY = "observability"


@dataclass
class GramianResult:
    """A solved Gramian: the symmetric PSD matrix, which side it describes,
    and the solver report."""

    matrix: np.ndarray
    kind: str
    report: GenSolveReport


@dataclass
class SubspaceBasis:
    """Orthonormal basis of the numerically significant range of a
    symmetric PSD matrix, with the eigenvalues that drove the rank cut."""

    basis: np.ndarray
    rank: int
    singular_values: np.ndarray
    rtol: float

    @property
    def n(self) -> int:
        return self.basis.shape[0]


@dataclass
class AveragedGramians:
    """Per-mode standard Gramians and their aggregate, the baseline the
    generalized Gramians are compared against."""

    P: np.ndarray
    Q: np.ndarray
    mode_P: list
    mode_Q: list
    scale: str


@dataclass
class RankVerdict:
    """Outcome of a complete-reachability or complete-observability test."""

    verdict: bool
    rank: int
    n: int


def dual_model(model: LssModel) -> LssModel:
    """Transpose every mode and swap the input and output maps; the
    observability Gramian of the original is the reachability Gramian of
    this dual."""
    modes = [(mode.A.T, mode.C.T, mode.B.T) for mode in model.modes]
    label = f"dual of {model.label}" if model.label else "dual"
    return LssModel(modes, label=label)


def reach_gramian(model: LssModel,
                  opts: Optional[GenSolveOptions] = None) -> GramianResult:
    """Solve for the generalized reachability Gramian of the model."""
    emb = bilinear_embed(model)
    W = np.zeros((model.n, model.n))
    for Bj in emb.B:
        W += Bj @ Bj.T
    X, report = solve_generalized(emb.A, list(emb.D), W, opts)
    return GramianResult(matrix=X, kind=KIND_REACHABILITY, report=report)


def obs_gramian(model: LssModel,
                opts: Optional[GenSolveOptions] = None) -> GramianResult:
    """Solve for the generalized observability Gramian, computed as the
    reachability Gramian of the dual model."""
    result = reach_gramian(dual_model(model), opts)
    return GramianResult(matrix=result.matrix, kind=KIND_OBSERVABILITY,
                         report=result.report)


def averaged_gramians(model: LssModel,
                      scale: str = "sum") -> AveragedGramians:
    """Per-mode standard Lyapunov Gramians aggregated across modes.

    scale 'sum' adds the per-mode solutions; 'mean' divides the sums by the
    number of modes. The scale does not change ranges.
    """
    if scale not in ("sum", "mean"):
        raise ValueError("scale must be 'sum' or 'mean'")
    mode_P = []
    mode_Q = []
    for j, mode in enumerate(model.modes, start=1):
        try:
            Pj = solve_lyapunov(mode.A, mode.B @ mode.B.T)
            Qj = solve_lyapunov(mode.A.T, mode.C.T @ mode.C)
        except NotHurwitzError as exc:
            raise NotHurwitzError(
                f"mode {j} is not Hurwitz (spectral abscissa "
                f"{exc.spectral_abscissa:.6g}); averaged Gramians need "
                "every mode stable",
                spectral_abscissa=exc.spectral_abscissa,
            ) from exc
        mode_P.append(Pj)
        mode_Q.append(Qj)
    P = np.sum(mode_P, axis=0)
    Q = np.sum(mode_Q, axis=0)
    if scale == "mean":
        P = P / model.n_modes
        Q = Q / model.n_modes
    return AveragedGramians(P=P, Q=Q, mode_P=mode_P, mode_Q=mode_Q,
                            scale=scale)


def range_basis(S: np.ndarray, rtol: float = 1e-10) -> SubspaceBasis:
    """Orthonormal basis of the range of a symmetric PSD matrix, keeping
    eigenvectors whose eigenvalue exceeds rtol times the largest one."""
    S = np.asarray(S, dtype=float)
    S = 0.5 * (S + S.T)
    w, U = np.linalg.eigh(S)
    w = w[::-1]
    U = U[:, ::-1]
    lam_max = w[0] if w.size else 0.0
    if lam_max <= 0.0:
        keep = np.zeros(w.size, dtype=bool)
    else:
        keep = w > rtol * lam_max
    rank = int(np.count_nonzero(keep))
    return SubspaceBasis(basis=U[:, :rank].copy(), rank=rank,
                         singular_values=w.copy(), rtol=rtol)


def psd_factor(S: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Factor a symmetric PSD matrix as F F^T with F of full column rank.

    Eigendecomposition-based so that singular Gramians factor cleanly;
    eigenvalues at or below rtol times the largest are treated as zero.
    """
    sub = range_basis(S, rtol=rtol)
    lam = sub.singular_values[:sub.rank]
    return sub.basis * np.sqrt(lam)


def subspace_contains(U: SubspaceBasis, V: SubspaceBasis,
                      tol: float = 1e-8) -> bool:
    """True when span(U) lies inside span(V) up to tol, measured as the
    spectral norm of the residual (I - V V^T) U."""
    if U.n != V.n:
        raise ValueError("subspaces live in different ambient dimensions")
    if U.rank == 0:
        return True
    resid = U.basis - V.basis @ (V.basis.T @ U.basis)
    return bool(np.linalg.norm(resid, 2) <= tol)


def max_principal_angle(U: SubspaceBasis, V: SubspaceBasis) -> float:
    """Largest principal angle between two subspaces, in radians.

    Computed from the sine (norm of the projection residual, taken both
    ways so unequal ranks register as pi/2), which stays accurate for
    angles far below the resolution of the cosine.
    """
    if U.n != V.n:
        raise ValueError("subspaces live in different ambient dimensions")
    if U.rank == 0 and V.rank == 0:
        return 0.0
    if U.rank == 0 or V.rank == 0:
        return float(np.pi / 2)
    r_uv = U.basis - V.basis @ (V.basis.T @ U.basis)
    r_vu = V.basis - U.basis @ (U.basis.T @ V.basis)
    s = max(np.linalg.norm(r_uv, 2), np.linalg.norm(r_vu, 2))
    return float(np.arcsin(min(1.0, max(0.0, s))))


def is_completely_reachable(model: LssModel,
                            opts: Optional[GenSolveOptions] = None,
                            rtol: float = 1e-10) -> RankVerdict:
    """Decide complete reachability from the rank of the reachability
    Gramian."""
    P = reach_gramian(model, opts).matrix
    rank = range_basis(P, rtol=rtol).rank
    return RankVerdict(verdict=rank == model.n, rank=rank, n=model.n)


def is_completely_observable(model: LssModel,
                             opts: Optional[GenSolveOptions] = None,
                             rtol: float = 1e-10) -> RankVerdict:
    """Decide complete observability from the rank of the observability
    Gramian."""
    Q = obs_gramian(model, opts).matrix
    rank = range_basis(Q, rtol=rtol).rank
    return RankVerdict(verdict=rank == model.n, rank=rank, n=model.n)
