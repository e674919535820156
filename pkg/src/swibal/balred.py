"""Square-root balanced truncation for switched systems.

Projectors come from Gramian factors P = S S^T, Q = R R^T and the SVD
S^T R = U diag(sigma) V^T: the leading r singular triplets give
V = S U_1 sigma_1^{-1/2} and W = R V_1 sigma_1^{-1/2}, which satisfy
W^T V = I_r without ever forming the balancing transformation. The sigma
are the Hankel singular values; twice the truncated tail times the input
energy is the a-priori output error bound. One global projector pair is
applied to every mode.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import (
    BiorthogonalityViolatedError,
    DegenerateGramiansError,
    NotPositiveDefiniteError,
    OrderCapWarning,
    OrderTooLargeError,
    TruncationTieWarning,
)
from .gramians import GramianResult, psd_factor
from .model import LssModel, bilinear_embed


@dataclass
class BalancedReduction:
    """Result of a balanced truncation: projectors, the full Hankel
    singular value vector, the reduced model, and the bound coefficient
    2 * sum of truncated singular values."""

    V: np.ndarray
    W: np.ndarray
    hsv: np.ndarray
    r: int
    reduced: LssModel
    bound_coefficient: float


@dataclass
class AssumptionReport:
    """Eigenvalue margins of the matrix inequalities under which the output
    error bound is proved.

    coupling_reach_min[k] is the smallest eigenvalue of
    sum_j D_j P D_j^T + sum_{j != k} B_j B_j^T - D_k P - P D_k^T for mode
    k = 2..M (coupling_obs_min is the dual); the verdict requires all of
    them >= -tol. dissipation_reach_max[k] is the largest eigenvalue of
    A_k P + P A_k^T + B_k B_k^T for mode k = 1..M (dual likewise); the
    strict flags mark modes where that is < -tol.
    """

    coupling_reach_min: np.ndarray
    coupling_obs_min: np.ndarray
    dissipation_reach_max: np.ndarray
    dissipation_obs_max: np.ndarray
    reach_strict: list
    obs_strict: list
    verdict: bool
    tol: float


@dataclass
class StabilityCertificate:
    """Outcome of checking one candidate common Lyapunov matrix: the
    largest eigenvalue of A_j^T X + X A_j per mode, negative for all modes
    iff the certificate proves quadratic stability."""

    verdict: bool
    mode_margins: np.ndarray


def _gram_matrix(G) -> np.ndarray:
    if isinstance(G, GramianResult):
        return G.matrix
    return np.asarray(G, dtype=float)


def hankel_singular_values(P, Q, rtol: float = 1e-10) -> np.ndarray:
    """Singular values of S^T R for Gramian factors S, R, sorted
    descending; these equal the square roots of the eigenvalues of P Q."""
    S = psd_factor(_gram_matrix(P), rtol=rtol)
    R = psd_factor(_gram_matrix(Q), rtol=rtol)
    if S.shape[1] == 0 or R.shape[1] == 0:
        return np.zeros(0)
    return np.linalg.svd(S.T @ R, compute_uv=False)


def error_bound(hsv: np.ndarray, r: int, u_l2: float) -> float:
    """A-priori output error bound 2 * (sum of sigma_k for k > r) * ||u||."""
    hsv = np.asarray(hsv, dtype=float)
    if r < 0 or r > hsv.size:
        raise OrderTooLargeError(
            f"r = {r} outside the valid range 0..{hsv.size}")
    if u_l2 < 0.0:
        raise ValueError("u_l2 must be nonnegative")
    return float(2.0 * hsv[r:].sum() * u_l2)


def project_model(model: LssModel, V: np.ndarray, W: np.ndarray) -> LssModel:
    """Apply one global projector pair to every mode: A_j -> W^T A_j V,
    B_j -> W^T B_j, C_j -> C_j V. Requires W^T V = I_r."""
    V = np.asarray(V, dtype=float)
    W = np.asarray(W, dtype=float)
    r = V.shape[1]
    gap = float(np.linalg.norm(W.T @ V - np.eye(r)))
    if gap > 1e-8:
        raise BiorthogonalityViolatedError(
            f"||W^T V - I|| = {gap:.3g} exceeds 1e-8; projectors are not "
            "biorthogonal")
    modes = [(W.T @ mode.A @ V, W.T @ mode.B, mode.C @ V)
             for mode in model.modes]
    label = f"{model.label} (r={r})" if model.label else f"reduced (r={r})"
    return LssModel(modes, label=label)


def balance_truncate(model: LssModel, P, Q, r: Optional[int] = None,
                     energy_tol: Optional[float] = None,
                     rtol: float = 1e-10) -> BalancedReduction:
    """Square-root balanced truncation of a switched system.

    Exactly one of r (target order) and energy_tol (singular value tail
    budget: smallest r with sum_{i>r} sigma_i <= energy_tol * sum sigma_i)
    selects the reduced order. A request beyond the numerical rank of
    S^T R is capped with a warning, since the projector formulas divide by
    the retained singular values.
    """
    P = _gram_matrix(P)
    Q = _gram_matrix(Q)
    if (r is None) == (energy_tol is None):
        raise ValueError("give exactly one of r and energy_tol")
    S = psd_factor(P, rtol=rtol)
    R = psd_factor(Q, rtol=rtol)
    if S.shape[1] == 0 or R.shape[1] == 0:
        raise DegenerateGramiansError(
            "a Gramian has numerical rank 0; nothing to balance")
    U, sv, Vt = np.linalg.svd(S.T @ R, full_matrices=False)
    if sv[0] <= 0.0:
        raise DegenerateGramiansError(
            "S^T R is identically zero; the Gramian ranges do not intersect")
    rank = int(np.count_nonzero(sv > rtol * sv[0]))

    if energy_tol is not None:
        if energy_tol < 0.0:
            raise ValueError("energy_tol must be nonnegative")
        total = sv.sum()
        r = rank
        for k in range(1, rank + 1):
            if sv[k:].sum() <= energy_tol * total:
                r = k
                break
    r = int(r)
    if r < 1:
        raise ValueError("reduced order r must be at least 1")
    if r > rank:
        warnings.warn(
            f"requested order {r} exceeds the numerical rank {rank} of "
            f"S^T R; capping at {rank}", OrderCapWarning, stacklevel=2)
        r = rank
    if r < sv.size and sv[r - 1] - sv[r] <= 1e-10 * sv[0]:
        warnings.warn(
            f"singular values {r} and {r + 1} are equal to working "
            "precision; the truncation split is not unique",
            TruncationTieWarning, stacklevel=2)

    scale = 1.0 / np.sqrt(sv[:r])
    V = S @ U[:, :r] * scale
    W = R @ Vt[:r].T * scale
    reduced = project_model(model, V, W)
    return BalancedReduction(
        V=V, W=W, hsv=sv, r=r, reduced=reduced,
        bound_coefficient=float(2.0 * sv[r:].sum()),
    )


def check_assumption1(model: LssModel, P, Q,
                      tol: float = 1e-8) -> AssumptionReport:
    """Eigenvalue check of the error-bound prerequisites.

    For each mode k >= 2 the coupling inequality requires
    D_k P + P D_k^T <= sum_j D_j P D_j^T + sum_{j != k} B_j B_j^T (and its
    dual); both follow from mode-wise dissipation
    A_k P + P A_k^T + B_k B_k^T <= 0, whose margins are reported with
    strictness flags.
    """
    P = _gram_matrix(P)
    Q = _gram_matrix(Q)
    emb = bilinear_embed(model)
    M = model.n_modes

    sum_dpd = np.zeros_like(P)
    sum_dqd = np.zeros_like(Q)
    sum_bb = np.zeros_like(P)
    sum_cc = np.zeros_like(Q)
    for Dj, Bj, Cj in zip(emb.D, emb.B, emb.C):
        sum_dpd += Dj @ P @ Dj.T
        sum_dqd += Dj.T @ Q @ Dj
        sum_bb += Bj @ Bj.T
        sum_cc += Cj.T @ Cj

    coupling_reach = []
    coupling_obs = []
    for k in range(1, M):
        Dk, Bk, Ck = emb.D[k], emb.B[k], emb.C[k]
        Mr = sum_dpd + (sum_bb - Bk @ Bk.T) - Dk @ P - P @ Dk.T
        Mo = sum_dqd + (sum_cc - Ck.T @ Ck) - Dk.T @ Q - Q @ Dk
        coupling_reach.append(np.linalg.eigvalsh(0.5 * (Mr + Mr.T)).min())
        coupling_obs.append(np.linalg.eigvalsh(0.5 * (Mo + Mo.T)).min())

    dissipation_reach = []
    dissipation_obs = []
    for mode in model.modes:
        Gr = mode.A @ P + P @ mode.A.T + mode.B @ mode.B.T
        Go = mode.A.T @ Q + Q @ mode.A + mode.C.T @ mode.C
        dissipation_reach.append(np.linalg.eigvalsh(0.5 * (Gr + Gr.T)).max())
        dissipation_obs.append(np.linalg.eigvalsh(0.5 * (Go + Go.T)).max())

    coupling_reach = np.array(coupling_reach)
    coupling_obs = np.array(coupling_obs)
    dissipation_reach = np.array(dissipation_reach)
    dissipation_obs = np.array(dissipation_obs)
    verdict = bool(
        (coupling_reach >= -tol).all() and (coupling_obs >= -tol).all())
    return AssumptionReport(
        coupling_reach_min=coupling_reach,
        coupling_obs_min=coupling_obs,
        dissipation_reach_max=dissipation_reach,
        dissipation_obs_max=dissipation_obs,
        reach_strict=[bool(v < -tol) for v in dissipation_reach],
        obs_strict=[bool(v < -tol) for v in dissipation_obs],
        verdict=verdict,
        tol=tol,
    )


def quadratic_stability_certificate(model: LssModel,
                                    X: np.ndarray) -> StabilityCertificate:
    """Check one candidate common Lyapunov matrix X > 0: the model is
    certified quadratically stable iff A_j^T X + X A_j is negative definite
    for every mode."""
    X = np.asarray(X, dtype=float)
    x_norm = np.linalg.norm(X)
    if np.linalg.norm(X - X.T) > 1e-10 * max(1.0, x_norm):
        raise NotPositiveDefiniteError("X must be symmetric")
    eig_min = float(np.linalg.eigvalsh(0.5 * (X + X.T)).min())
    if eig_min <= 0.0:
        raise NotPositiveDefiniteError(
            f"X is not positive definite (min eigenvalue {eig_min:.3g})")
    margins = []
    for mode in model.modes:
        G = mode.A.T @ X + X @ mode.A
        margins.append(np.linalg.eigvalsh(0.5 * (G + G.T)).max())
    margins = np.array(margins)
    return StabilityCertificate(verdict=bool(margins.max() < 0.0),
                                mode_margins=margins)
