"""Built-in example systems and random instance generators.

example1 is a small 2-mode system whose Gramian is known in closed form
(diagonal with entries 1/2, 1/4, 1/8, 1/16 and 1/2 in the last slot), so
it anchors exactness tests. example2 is a scalable 2-mode tridiagonal
family with boundary input/output placement, used for reduction and
error-bound experiments; its standard scenario switches seven times over a
6 second horizon under a decaying sine input.

Random instances are built around a normal stable A_1 = skew - (c + rho) I
whose decay rate is exact, with mode perturbations D_j scaled small enough
that the Gramian series converges and every A_j stays Hurwitz.
"""

from __future__ import annotations

import numpy as np

from .model import LssModel, Scenario, SineDecayInput, SwitchingSignal


def example1() -> LssModel:
    """8-state 2-mode system with a closed-form diagonal reachability
    Gramian and a reachable space of dimension 5."""
    n = 8
    A1 = -np.eye(n)
    D = np.zeros((n, n))
    D[1, 0] = D[2, 1] = D[3, 2] = 1.0
    A2 = A1 + D
    B1 = np.zeros((n, 1))
    B1[0, 0] = 1.0
    B2 = np.zeros((n, 1))
    B2[n - 1, 0] = 1.0
    C = np.zeros((1, n))
    return LssModel([(A1, B1, C), (A2, B2, C)], label="example1")


def example2(n: int = 100) -> LssModel:
    """Scalable 2-mode tridiagonal family: mode 1 has subdiagonal 0.1 and
    superdiagonal 1, mode 2 has subdiagonal 1 and superdiagonal 0.5, both
    with -2 on the diagonal. Input enters at the first (mode 1) or last
    (mode 2) state; the output reads the second or second-to-last state."""
    if n < 3:
        raise ValueError("example2 needs n >= 3")
    main = -2.0 * np.ones(n)
    A1 = np.diag(main) + np.diag(0.1 * np.ones(n - 1), -1) \
        + np.diag(1.0 * np.ones(n - 1), 1)
    A2 = np.diag(main) + np.diag(1.0 * np.ones(n - 1), -1) \
        + np.diag(0.5 * np.ones(n - 1), 1)
    B1 = np.zeros((n, 1))
    B1[0, 0] = 1.0
    B2 = np.zeros((n, 1))
    B2[n - 1, 0] = 1.0
    C1 = np.zeros((1, n))
    C1[0, 1] = 1.0
    C2 = np.zeros((1, n))
    C2[0, n - 2] = 1.0
    return LssModel([(A1, B1, C1), (A2, B2, C2)], label=f"example2_n{n}")


def example2_scenario() -> Scenario:
    """The standard example2 experiment: mode 1 on [0, 0.5), [2, 2.5),
    [4, 5) and [5.5, 6], mode 2 in between, driven by
    u(t) = 10 sin(30 t) exp(-t) over a 6 second horizon."""
    signal = SwitchingSignal([
        (0.5, 1), (2.0, 2), (2.5, 1), (4.0, 2), (5.0, 1), (5.5, 2),
        (6.0, 1),
    ])
    return Scenario(signal=signal, input=SineDecayInput(10.0, 30.0, 1.0),
                    horizon=6.0)


def random_stable_model(rng: np.random.Generator, n: int, n_modes: int = 2,
                        m: int = 1, p: int = 1,
                        coupling: float = 0.5) -> LssModel:
    """Random stable switched system with a convergent Gramian series.

    A_1 = (G - G^T)/2 - (c + rho(G)) I is normal with decay rate exactly
    c + rho(G); the perturbations D_j = A_j - A_1 are scaled so that
    ||sum_j D_j D_j^T||_2 <= coupling * 2 alpha (series convergence margin
    for coupling < 1) and ||D_j||_2 <= 0.9 alpha (every mode Hurwitz).
    """
    if coupling <= 0.0 or coupling >= 1.0:
        raise ValueError("coupling must lie strictly between 0 and 1")
    G = rng.standard_normal((n, n))
    rho = float(np.max(np.abs(np.linalg.eigvals(G))))
    c = 0.5 + rng.uniform(0.0, 0.5)
    A1 = 0.5 * (G - G.T) - (c + rho) * np.eye(n)
    alpha = c + rho
    modes = []
    if n_modes > 1:
        budget = np.sqrt(coupling * 2.0 * alpha / (n_modes - 1))
    else:
        budget = 0.0
    d_scale = min(0.9 * alpha, budget)
    for j in range(n_modes):
        if j == 0:
            Aj = A1
        else:
            Dj = rng.standard_normal((n, n))
            Dj *= d_scale / max(np.linalg.norm(Dj, 2), np.finfo(float).tiny)
            Aj = A1 + Dj
        Bj = rng.standard_normal((n, m))
        Cj = rng.standard_normal((p, n))
        modes.append((Aj, Bj, Cj))
    return LssModel(modes, label=f"random_n{n}_M{n_modes}")


def random_structured_model(rng: np.random.Generator, n: int, k: int,
                            n_modes: int = 2, m: int = 1, p: int = 1,
                            coupling: float = 0.5) -> LssModel:
    """Random stable model whose reachable space is contained in the span
    of the first k coordinates: every A_j keeps that span invariant (zero
    block below the leading k columns) and every B_j is supported there.

    Useful for exercising rank-deficient Gramians against the closure
    oracle. Zeroing the lower-left block of the skew part keeps the
    spectrum on the line Re = -(c + rho), so the decay rate stays exact.
    """
    if not 1 <= k <= n:
        raise ValueError("k must satisfy 1 <= k <= n")
    if coupling <= 0.0 or coupling >= 1.0:
        raise ValueError("coupling must lie strictly between 0 and 1")
    G = rng.standard_normal((n, n))
    rho = float(np.max(np.abs(np.linalg.eigvals(G))))
    c = 0.5 + rng.uniform(0.0, 0.5)
    A1 = 0.5 * (G - G.T) - (c + rho) * np.eye(n)
    A1[k:, :k] = 0.0
    alpha = c + rho
    if n_modes > 1:
        budget = np.sqrt(coupling * 2.0 * alpha / (n_modes - 1))
    else:
        budget = 0.0
    d_scale = min(0.9 * alpha, budget)
    modes = []
    for j in range(n_modes):
        if j == 0:
            Aj = A1
        else:
            Dj = rng.standard_normal((n, n))
            Dj[k:, :k] = 0.0
            Dj *= d_scale / max(np.linalg.norm(Dj, 2), np.finfo(float).tiny)
            Aj = A1 + Dj
        Bj = np.zeros((n, m))
        Bj[:k] = rng.standard_normal((k, m))
        Cj = rng.standard_normal((p, n))
        modes.append((Aj, Bj, Cj))
    return LssModel(modes, label=f"structured_n{n}_k{k}_M{n_modes}")


def random_rank_stable_model(rng: np.random.Generator,
                             n_low: int = 2, n_high: int = 8,
                             modes_high: int = 3, m: int = 1, p: int = 1,
                             coupling: float = 0.3,
                             structured_ratio: float = 0.5,
                             min_energy: float = 1e-8,
                             max_tries: int = 80) -> LssModel:
    """Draw a random model on which Gramian numerical rank is a stable
    decision, so span comparisons against the subspace closure are
    well-posed.

    Mixes fully reachable draws with structured rank-deficient ones (ratio
    `structured_ratio`). A heavily damped draw can leave an algebraically
    reachable direction with Gramian energy near or below the 1e-10 rank
    cutoff, where energy rank and span rank legitimately disagree; a draw
    is rejected unless every closure direction carries relative Gramian
    energy of at least `min_energy`, on both the reachability and the
    observability side.
    """
    from .gramians import obs_gramian, reach_gramian
    from .oracle import (observable_space_bruteforce,
                         reachable_space_bruteforce)

    def _energy_separated(S: np.ndarray, closure) -> bool:
        S = 0.5 * (S + S.T)
        top = float(np.linalg.eigvalsh(S)[-1])
        V = closure.basis.basis
        if V.shape[1] == 0:
            # nothing reachable; the Gramian must be numerically zero
            return top <= 1e-12
        if top <= 0.0:
            return False
        lam = np.linalg.eigvalsh(V.T @ S @ V)
        return bool(lam.min() >= min_energy * top)

    for _ in range(max_tries):
        n = int(rng.integers(n_low, n_high + 1))
        n_modes = int(rng.integers(1, modes_high + 1))
        if rng.uniform() < structured_ratio:
            k = int(rng.integers(1, n + 1))
            model = random_structured_model(rng, n, k, n_modes=n_modes,
                                            m=m, p=p, coupling=coupling)
        else:
            model = random_stable_model(rng, n, n_modes=n_modes, m=m, p=p,
                                        coupling=coupling)
        P = reach_gramian(model).matrix
        if not _energy_separated(P, reachable_space_bruteforce(model)):
            continue
        Q = obs_gramian(model).matrix
        if not _energy_separated(Q, observable_space_bruteforce(model)):
            continue
        return model
    raise RuntimeError(
        f"no rank-stable draw within {max_tries} tries; loosen min_energy "
        "or the instance parameters"
    )


def random_dissipative_model(rng: np.random.Generator, n: int,
                             n_modes: int = 2, m: int = 1, p: int = 1,
                             jitter: float = 0.2) -> LssModel:
    """Random model whose later modes are contractive shifts of the first:
    A_k = A_1 - eps_k I + jitter * eps_k R_k with ||R_k||_2 = 1.

    With jitter 0 the shift makes every mode strictly dissipative against
    the generalized Gramians (the offsets only add negative-definite terms
    to the mode-wise inequalities), so this family produces instances where
    the strict form of the error-bound prerequisite actually holds; raising
    jitter erodes that margin and mixes in failures.
    """
    if jitter < 0.0:
        raise ValueError("jitter must be nonnegative")
    G = rng.standard_normal((n, n))
    rho = float(np.max(np.abs(np.linalg.eigvals(G))))
    c = 0.5 + rng.uniform(0.0, 0.5)
    A1 = 0.5 * (G - G.T) - (c + rho) * np.eye(n)
    alpha = c + rho
    modes = [(A1, rng.standard_normal((n, m)), rng.standard_normal((p, n)))]
    for _ in range(1, n_modes):
        eps = rng.uniform(0.05, 0.3) * alpha
        R = rng.standard_normal((n, n))
        R /= np.linalg.norm(R, 2)
        Dk = -eps * np.eye(n) + jitter * eps * R
        modes.append((A1 + Dk, rng.standard_normal((n, m)),
                      rng.standard_normal((p, n))))
    return LssModel(modes, label=f"dissipative_n{n}_M{n_modes}")
