"""Backend equivalence tests for the compiled and reference kernels.

Both backends expose the same three entry points (prep_lyapunov,
solve_lyapunov_prepped, rk4_segment) and must agree to near machine
precision on well conditioned inputs.  The compiled backend is optional;
every comparison here degrades to reference-vs-reference when the
extension is not built, so the suite stays green either way.
"""

import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.linalg

from swibal._kernels import _reference
from swibal._kernels import backend, active_backend_name

try:
    from swibal._kernels import _compiled
    HAVE_COMPILED = True
except ImportError:
    _compiled = None
    HAVE_COMPILED = False


def _random_stable(rng, n):
    G = rng.standard_normal((n, n))
    return G - (0.1 + max(0.0, np.linalg.eigvals(G).real.max())) * np.eye(n)


def _backends():
    out = [_reference]
    if HAVE_COMPILED:
        out.append(_compiled)
    return out


def test_active_backend_is_one_of_the_two():
    assert active_backend_name in ("compiled", "reference")
    assert backend.name == active_backend_name


def test_lyapunov_matches_scipy_across_backends():
    rng = np.random.default_rng(7)
    for trial in range(40):
        n = int(rng.integers(1, 13))
        A = _random_stable(rng, n)
        G = rng.standard_normal((n, n))
        W = G @ G.T + np.eye(n)
        X_ref = scipy.linalg.solve_lyapunov(A, -W)
        for mod in _backends():
            fact, eigs = mod.prep_lyapunov(A)
            X = mod.solve_lyapunov_prepped(fact, W)
            assert np.allclose(X, X.T)
            assert np.allclose(X, X_ref, rtol=1e-9, atol=1e-9), (
                f"trial {trial} backend {mod.name} n={n}"
            )
            true_eigs = np.linalg.eigvals(A)
            for lam in eigs:
                assert np.abs(true_eigs - lam).min() <= 1e-8


def test_lyapunov_prep_is_reusable():
    # one factorization, many right hand sides
    rng = np.random.default_rng(3)
    A = _random_stable(rng, 8)
    for mod in _backends():
        fact, _ = mod.prep_lyapunov(A)
        for _ in range(5):
            G = rng.standard_normal((8, 8))
            W = G @ G.T
            X = mod.solve_lyapunov_prepped(fact, W)
            res = A @ X + X @ A.T + W
            assert np.linalg.norm(res) <= 1e-9 * max(1.0, np.linalg.norm(W))


def test_lyapunov_identity_solution():
    # A = -1/2 I gives A X + X A^T = -X, so X = W exactly
    for mod in _backends():
        W = np.array([[2.0, 1.0], [1.0, 3.0]])
        fact, _ = mod.prep_lyapunov(-0.5 * np.eye(2))
        X = mod.solve_lyapunov_prepped(fact, W)
        assert np.allclose(X, W, atol=1e-13)


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled extension not built")
def test_trilyap_quasi_triangular_direct():
    from swibal._kernels._fast import trilyap_qtri

    rng = np.random.default_rng(11)
    for n in (1, 2, 3, 5, 8, 13, 21):
        A = _random_stable(rng, n)
        T, U = scipy.linalg.schur(A, output="real")
        G = rng.standard_normal((n, n))
        C = G @ G.T + np.eye(n)
        X = trilyap_qtri(np.ascontiguousarray(T), np.ascontiguousarray(C))
        res = T @ X + X @ T.T - C
        assert np.linalg.norm(res) <= 1e-10 * np.linalg.norm(C)
        assert np.allclose(X, X.T, atol=1e-12)


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled extension not built")
def test_trilyap_rejects_bad_shapes():
    from swibal._kernels._fast import trilyap_qtri

    T = np.zeros((3, 3))
    with pytest.raises(ValueError):
        trilyap_qtri(T, np.zeros((2, 2)))
    with pytest.raises(ValueError):
        trilyap_qtri(np.zeros((2, 3)), np.zeros((2, 2)))


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled extension not built")
def test_trilyap_singular_spectrum_raises():
    # eigenvalues 1 and -1 give lambda_i + lambda_j = 0
    from swibal._kernels._fast import trilyap_qtri

    T = np.array([[1.0, 0.5], [0.0, -1.0]])
    C = np.eye(2)
    with pytest.raises(ValueError):
        trilyap_qtri(T, C)


def test_rk4_segment_backends_agree():
    rng = np.random.default_rng(19)
    for trial in range(30):
        n = int(rng.integers(1, 9))
        m = int(rng.integers(1, 4))
        steps = int(rng.integers(1, 40))
        A = _random_stable(rng, n)
        B = rng.standard_normal((n, m))
        u = rng.standard_normal((2 * steps + 1, m))
        x0 = rng.standard_normal(n)
        h = float(rng.uniform(1e-3, 0.05))
        outs = [mod.rk4_segment(A, B, u, x0, h, steps) for mod in _backends()]
        for X in outs:
            assert X.shape == (steps + 1, n)
            assert np.array_equal(X[0], x0)
        if len(outs) == 2:
            assert np.allclose(outs[0], outs[1], rtol=1e-13, atol=1e-13)


def test_rk4_segment_fourth_order_on_scalar_decay():
    # x' = -x, x(0)=1: single step error of classical RK4 is h^5/120 + O(h^6)
    A = np.array([[-1.0]])
    B = np.zeros((1, 1))
    x0 = np.array([1.0])
    for mod in _backends():
        for h in (0.1, 0.05):
            u = np.zeros((3, 1))
            X = mod.rk4_segment(A, B, u, x0, h, 1)
            step_err = abs(X[1, 0] - np.exp(-h))
            assert step_err <= (h ** 5) / 100.0


def test_rk4_segment_zero_steps_returns_initial_row():
    A = np.array([[-1.0, 0.0], [0.0, -2.0]])
    B = np.ones((2, 1))
    x0 = np.array([1.0, -1.0])
    for mod in _backends():
        X = mod.rk4_segment(A, B, np.zeros((1, 1)), x0, 0.1, 0)
        assert X.shape == (1, 2)
        assert np.array_equal(X[0], x0)


def test_backend_env_override_subprocess():
    # SWIBAL_KERNELS=reference must force the pure python path
    code = "import swibal; print(swibal.active_backend_name)"
    env = dict(os.environ, SWIBAL_KERNELS="reference")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.strip() == "reference"


def test_backend_env_invalid_value_fails_import():
    code = "import swibal"
    env = dict(os.environ, SWIBAL_KERNELS="turbo")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True)
    assert out.returncode != 0
    assert "SWIBAL_KERNELS" in out.stderr
