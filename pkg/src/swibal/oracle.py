"""Gramian-free computation of reachable and observable subspaces.

The reachable set of a switched system is the smallest subspace containing
every range(B_i) that is invariant under every A_i. It is computed here by
a plain closure sweep: orthonormalize the seed columns, append the images
under each generator, re-orthonormalize, and repeat until the rank stops
growing. Rank is bounded by n and can only grow, so at most n sweeps are
needed. These closures serve as ground truth for the Gramian ranges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .gramians import SubspaceBasis
from .model import LssModel, bilinear_embed


@dataclass
class ClosureResult:
    """A converged (or sweep-capped) invariant-subspace closure."""

    basis: SubspaceBasis
    sweeps: int
    saturated: bool


def _orth(cols: np.ndarray, rtol: float):
    """Rank-revealing orthonormalization via SVD; returns (basis, singular
    values)."""
    n = cols.shape[0]
    if cols.shape[1] == 0:
        return np.zeros((n, 0)), np.zeros(0)
    U, s, _ = np.linalg.svd(cols, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        return np.zeros((n, 0)), s
    keep = int(np.count_nonzero(s > rtol * s[0]))
    return U[:, :keep].copy(), s


def _closure(generators: list, seeds: list, n: int, max_sweeps: int,
             rtol: float) -> ClosureResult:
    seed_cols = (np.hstack(seeds) if seeds else np.zeros((n, 0)))
    V, s = _orth(seed_cols, rtol)
    sweeps = 0
    saturated = V.shape[1] == n
    while not saturated and sweeps < max_sweeps:
        stacked = [V] + [G @ V for G in generators]
        V_new, s = _orth(np.hstack(stacked), rtol)
        sweeps += 1
        if V_new.shape[1] == V.shape[1] or V_new.shape[1] == n:
            saturated = True
        V = V_new
    basis = SubspaceBasis(basis=V, rank=V.shape[1], singular_values=s,
                          rtol=rtol)
    return ClosureResult(basis=basis, sweeps=sweeps, saturated=saturated)


def reachable_space_bruteforce(model: LssModel,
                               max_sweeps: Optional[int] = None,
                               rtol: float = 1e-10) -> ClosureResult:
    """Smallest subspace containing every range(B_j) and invariant under
    every A_j."""
    if max_sweeps is None:
        max_sweeps = model.n
    return _closure([mode.A for mode in model.modes],
                    [mode.B for mode in model.modes],
                    model.n, max_sweeps, rtol)


def observable_space_bruteforce(model: LssModel,
                                max_sweeps: Optional[int] = None,
                                rtol: float = 1e-10) -> ClosureResult:
    """Dual closure: smallest subspace containing every range(C_j^T) and
    invariant under every A_j^T."""
    if max_sweeps is None:
        max_sweeps = model.n
    return _closure([mode.A.T for mode in model.modes],
                    [mode.C.T for mode in model.modes],
                    model.n, max_sweeps, rtol)


def embedded_closure(model: LssModel, max_sweeps: Optional[int] = None,
                     rtol: float = 1e-10) -> ClosureResult:
    """Closure over the embedded generator set {D_1..D_M, A} instead of
    {A_1..A_M}; both sets span the same invariant subspace since each A_j
    is A + D_j."""
    if max_sweeps is None:
        max_sweeps = model.n
    emb = bilinear_embed(model)
    generators = list(emb.D) + [emb.A]
    return _closure(generators, list(emb.B), model.n, max_sweeps, rtol)
