"""Tests for generalized and averaged Gramians and range-space utilities."""

import numpy as np
import pytest

from swibal.exceptions import NotHurwitzError
from swibal.gramians import (
    KIND_OBSERVABILITY,
    KIND_REACHABILITY,
    averaged_gramians,
    dual_model,
    is_completely_observable,
    is_completely_reachable,
    max_principal_angle,
    obs_gramian,
    psd_factor,
    range_basis,
    reach_gramian,
    subspace_contains,
)
from swibal.lyapsolve import residual
from swibal.model import LssModel, Mode, bilinear_embed
from swibal.families import example1, example2, random_stable_model


def _basis_from_columns(cols):
    return range_basis(cols @ cols.T)


# ---------------------------------------------------------------------------
# exact values on the cascade model


def test_example1_reach_gramian_exact():
    res = reach_gramian(example1())
    expect = np.diag([0.5, 0.25, 0.125, 0.0625, 0.0, 0.0, 0.0, 0.5])
    assert res.kind == KIND_REACHABILITY
    assert np.abs(res.matrix - expect).max() <= 1e-10
    assert res.report.converged


def test_example1_averaged_gramian_exact():
    # per-mode pairs (-I, e1) and (-I, e8) give diag parts 1/2 each
    avg = averaged_gramians(example1())
    expect = np.zeros((8, 8))
    expect[0, 0] = expect[7, 7] = 0.5
    assert np.abs(avg.P - expect).max() <= 1e-12
    assert len(avg.mode_P) == 2
    assert np.abs(avg.mode_P[0] - np.diag([0.5] + [0.0] * 7)).max() <= 1e-12


def test_example1_rank_and_containment():
    model = example1()
    P = reach_gramian(model).matrix
    avg = averaged_gramians(model)
    sub_gen = range_basis(P)
    sub_avg = range_basis(avg.P)
    assert sub_gen.rank == 5
    assert sub_avg.rank == 2
    assert subspace_contains(sub_avg, sub_gen)
    assert not subspace_contains(sub_gen, sub_avg)
    # the generalized range is exactly span{e1..e4, e8}
    explicit = np.zeros((8, 5))
    for k, idx in enumerate((0, 1, 2, 3, 7)):
        explicit[idx, k] = 1.0
    assert max_principal_angle(sub_gen, _basis_from_columns(explicit)) <= 1e-8


def test_example1_not_completely_reachable():
    verdict = is_completely_reachable(example1())
    assert not verdict.verdict
    assert (verdict.rank, verdict.n) == (5, 8)


def test_example1_observability_rank_zero():
    # both output maps are zero
    verdict = is_completely_observable(example1())
    assert not verdict.verdict
    assert verdict.rank == 0


# ---------------------------------------------------------------------------
# duality and residuals


def test_obs_gramian_is_dual_reach_gramian_exactly():
    model = example2(9)
    direct = reach_gramian(dual_model(model)).matrix
    Q = obs_gramian(model)
    assert Q.kind == KIND_OBSERVABILITY
    assert np.array_equal(Q.matrix, direct)


def test_dual_model_swaps_b_and_c():
    model = example2(5)
    dual = dual_model(model)
    for j in range(model.n_modes):
        assert np.array_equal(dual.A[j], model.A[j].T)
        assert np.array_equal(dual.B[j], model.C[j].T)
        assert np.array_equal(dual.C[j], model.B[j].T)
    assert dual_model(dual).label != model.label  # label marks the dual


def test_gramians_satisfy_defining_equations():
    rng = np.random.default_rng(100)
    for _ in range(10):
        model = random_stable_model(rng, n=int(rng.integers(2, 9)),
                                    n_modes=int(rng.integers(1, 4)))
        emb = bilinear_embed(model)
        P = reach_gramian(model).matrix
        Wr = sum(Bj @ Bj.T for Bj in emb.B)
        assert residual(emb.A, list(emb.D), Wr, P) <= 1e-10
        demb = bilinear_embed(dual_model(model))
        Q = obs_gramian(model).matrix
        Wo = sum(Bj @ Bj.T for Bj in demb.B)
        assert residual(demb.A, list(demb.D), Wo, Q) <= 1e-10


def test_gramians_are_psd():
    rng = np.random.default_rng(200)
    for _ in range(10):
        model = random_stable_model(rng, n=6, n_modes=2, m=2, p=2)
        for res in (reach_gramian(model), obs_gramian(model)):
            lam = np.linalg.eigvalsh(res.matrix)
            assert lam.min() >= -1e-10 * max(1.0, lam.max())


def test_single_mode_reduces_to_standard_gramian():
    rng = np.random.default_rng(31)
    model = random_stable_model(rng, n=5, n_modes=1, m=2, p=1)
    P = reach_gramian(model).matrix
    avg = averaged_gramians(model)
    assert np.allclose(P, avg.P, atol=1e-12)
    Q = obs_gramian(model).matrix
    assert np.allclose(Q, avg.Q, atol=1e-12)


def test_scalar_gramian_closed_form():
    # x' = -x + u, y = 3x: P = 1/2, Q = 9/2
    model = LssModel((Mode(A=np.array([[-1.0]]), B=np.array([[1.0]]),
                           C=np.array([[3.0]])),))
    assert reach_gramian(model).matrix[0, 0] == pytest.approx(0.5, rel=1e-12)
    assert obs_gramian(model).matrix[0, 0] == pytest.approx(4.5, rel=1e-12)


# ---------------------------------------------------------------------------
# averaged gramians


def test_averaged_scale_mean_halves_sum_for_two_modes():
    model = example2(8)
    s = averaged_gramians(model, scale="sum")
    m = averaged_gramians(model, scale="mean")
    assert np.allclose(m.P, 0.5 * s.P, rtol=1e-14)
    assert np.allclose(m.Q, 0.5 * s.Q, rtol=1e-14)
    assert range_basis(s.P).rank == range_basis(m.P).rank


def test_averaged_rejects_unknown_scale():
    with pytest.raises(ValueError):
        averaged_gramians(example1(), scale="median")


def test_averaged_names_unstable_mode():
    good = Mode(A=-np.eye(2), B=np.ones((2, 1)), C=np.ones((1, 2)))
    bad = Mode(A=np.eye(2), B=np.ones((2, 1)), C=np.ones((1, 2)))
    with pytest.raises(NotHurwitzError, match="mode 2"):
        averaged_gramians(LssModel((good, bad)))


def test_averaged_range_contained_in_generalized_range():
    rng = np.random.default_rng(55)
    for _ in range(15):
        model = random_stable_model(rng, n=int(rng.integers(2, 8)),
                                    n_modes=int(rng.integers(2, 4)))
        P = reach_gramian(model).matrix
        avg = averaged_gramians(model)
        assert subspace_contains(range_basis(avg.P), range_basis(P))
        Q = obs_gramian(model).matrix
        assert subspace_contains(range_basis(avg.Q), range_basis(Q))


# ---------------------------------------------------------------------------
# range utilities


def test_range_basis_of_zero_matrix():
    sub = range_basis(np.zeros((4, 4)))
    assert sub.rank == 0
    assert sub.basis.shape == (4, 0)


def test_range_basis_orthonormal():
    rng = np.random.default_rng(8)
    G = rng.standard_normal((6, 3))
    sub = range_basis(G @ G.T)
    assert sub.rank == 3
    assert np.allclose(sub.basis.T @ sub.basis, np.eye(3), atol=1e-12)
    # the full spectrum rides along, in descending order
    assert sub.singular_values.shape == (6,)
    assert np.all(np.diff(sub.singular_values) <= 0)
    assert sub.singular_values[2] > sub.singular_values[3] * 1e6


def test_psd_factor_reconstructs():
    rng = np.random.default_rng(16)
    for k in (1, 3, 6):
        G = rng.standard_normal((6, k))
        S = G @ G.T
        F = psd_factor(S)
        assert F.shape == (6, min(k, 6))
        assert np.allclose(F @ F.T, S, atol=1e-10 * max(1, np.abs(S).max()))


def test_psd_factor_of_zero_is_empty():
    F = psd_factor(np.zeros((3, 3)))
    assert F.shape == (3, 0)


def test_subspace_contains_basic_cases():
    e1 = _basis_from_columns(np.array([[1.0], [0.0]]))
    e2 = _basis_from_columns(np.array([[0.0], [1.0]]))
    full = range_basis(np.eye(2))
    assert subspace_contains(e1, e1)
    assert subspace_contains(e1, full)
    assert not subspace_contains(full, e1)
    assert not subspace_contains(e1, e2)
    zero = range_basis(np.zeros((2, 2)))
    assert subspace_contains(zero, e1)


def test_subspace_ambient_mismatch():
    a = range_basis(np.eye(2))
    b = range_basis(np.eye(3))
    with pytest.raises(ValueError):
        subspace_contains(a, b)
    with pytest.raises(ValueError):
        max_principal_angle(a, b)


def test_max_principal_angle_cases():
    e1 = _basis_from_columns(np.array([[1.0], [0.0]]))
    e2 = _basis_from_columns(np.array([[0.0], [1.0]]))
    assert max_principal_angle(e1, e1) <= 1e-12
    assert max_principal_angle(e1, e2) == pytest.approx(np.pi / 2)
    zero = range_basis(np.zeros((2, 2)))
    assert max_principal_angle(zero, zero) == 0.0
    assert max_principal_angle(zero, e1) == pytest.approx(np.pi / 2)


def test_max_principal_angle_resolves_tiny_rotations():
    # sine-based angles stay accurate where the cosine saturates
    eps = 1e-9
    c, s = np.cos(eps), np.sin(eps)
    u = _basis_from_columns(np.array([[1.0], [0.0]]))
    v = _basis_from_columns(np.array([[c], [s]]))
    angle = max_principal_angle(u, v)
    assert angle == pytest.approx(eps, rel=1e-4)


def test_rank_invariant_under_orthogonal_state_transform():
    rng = np.random.default_rng(71)
    model = example1()
    Qmat, _ = np.linalg.qr(rng.standard_normal((8, 8)))
    modes = tuple(
        Mode(A=Qmat @ Aj @ Qmat.T, B=Qmat @ Bj, C=Cj @ Qmat.T)
        for Aj, Bj, Cj in zip(model.A, model.B, model.C)
    )
    rotated = LssModel(modes)
    P = reach_gramian(rotated).matrix
    assert range_basis(P).rank == 5
    # eigenvalue profile carries over
    base = np.linalg.eigvalsh(reach_gramian(model).matrix)
    assert np.allclose(np.linalg.eigvalsh(P), base, atol=1e-10)


def test_completely_reachable_and_observable_full_rank_family():
    verdict_r = is_completely_reachable(example2(10))
    verdict_o = is_completely_observable(example2(10))
    assert verdict_r.verdict and verdict_r.rank == 10
    assert verdict_o.verdict and verdict_o.rank == 10
