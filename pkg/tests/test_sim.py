"""Tests for switched/bilinear simulation and the L2 norm helpers.

Closed-form trajectories (scalar decay, matrix exponential via scipy) and
adaptive quadrature (scipy.integrate.quad) serve as the independent
references throughout.
"""

import math

import numpy as np
import pytest
import scipy.integrate
import scipy.linalg

from swibal.exceptions import SimulationOverflowError
from swibal.model import (
    ConstantInput,
    LssModel,
    Mode,
    SampledInput,
    Scenario,
    SineDecayInput,
    SwitchingSignal,
    ZeroInput,
    bilinear_embed,
)
from swibal.sim import (
    Trajectory,
    l2_norm_input,
    l2_norm_output,
    output_error,
    simulate_bilinear,
    simulate_switched,
)
from swibal.balred import balance_truncate
from swibal.gramians import obs_gramian, reach_gramian
from swibal.families import (
    example2,
    example2_scenario,
    random_stable_model,
)


def _single_mode(A, B, C):
    return LssModel((Mode(A=np.atleast_2d(np.asarray(A, dtype=float)),
                          B=np.atleast_2d(np.asarray(B, dtype=float)),
                          C=np.atleast_2d(np.asarray(C, dtype=float))),))


def _hold(mode=1, t_end=1.0):
    return SwitchingSignal([(t_end, mode)])


# ---------------------------------------------------------------------------
# basic integration accuracy


def test_scalar_decay_closed_form():
    model = _single_mode([[-1.0]], [[0.0]], [[1.0]])
    scen = Scenario(signal=_hold(), input=ZeroInput(), horizon=1.0,
                    x0=np.array([1.0]))
    traj = simulate_switched(model, scen, h=1e-3)
    assert traj.t[0] == 0.0
    assert traj.t[-1] == 1.0
    assert abs(traj.x[-1, 0] - math.exp(-1.0)) <= 1e-8
    assert np.allclose(traj.y[:, 0], traj.x[:, 0])


def test_zero_everything_stays_zero():
    model = _single_mode([[-2.0]], [[1.0]], [[1.0]])
    scen = Scenario(signal=_hold(), input=ZeroInput(), horizon=2.0)
    traj = simulate_switched(model, scen, h=1e-2)
    assert np.all(traj.x == 0.0)
    assert np.all(traj.y == 0.0)


def test_matches_matrix_exponential_with_constant_input():
    rng = np.random.default_rng(2)
    for _ in range(5):
        n = 4
        G = rng.standard_normal((n, n))
        A = G - (0.3 + max(0.0, np.linalg.eigvals(G).real.max())) * np.eye(n)
        B = rng.standard_normal((n, 2))
        u = rng.standard_normal(2)
        x0 = rng.standard_normal(n)
        model = LssModel((Mode(A=A, B=B, C=np.eye(n)),))
        scen = Scenario(signal=_hold(), input=ConstantInput(u), horizon=1.0,
                        x0=x0)
        traj = simulate_switched(model, scen, h=1e-3)
        # variation of constants at the endpoint
        E = scipy.linalg.expm(A)
        x_exact = E @ x0 + np.linalg.solve(A, (E - np.eye(n)) @ (B @ u))
        assert np.abs(traj.x[-1] - x_exact).max() <= 1e-8


def test_fourth_order_grid_convergence():
    # smooth single-mode problem: halving h shrinks the endpoint error
    # by about 16
    A = np.array([[-1.0, 2.0], [0.0, -3.0]])
    B = np.array([[0.0], [1.0]])
    model = LssModel((Mode(A=A, B=B, C=np.eye(2)),))
    u = SineDecayInput(amplitude=1.0, omega=2.0, lam=0.5)
    scen = Scenario(signal=_hold(), input=u, horizon=1.0,
                    x0=np.array([1.0, -1.0]))
    ref = simulate_switched(model, scen, h=1e-2 / 8).x[-1]
    e1 = np.abs(simulate_switched(model, scen, h=1e-2).x[-1] - ref).max()
    e2 = np.abs(simulate_switched(model, scen, h=5e-3).x[-1] - ref).max()
    ratio = e1 / e2
    assert 12.0 <= ratio <= 20.0


def test_linearity_in_the_input():
    model = example2(6)
    scen = example2_scenario()
    base = simulate_switched(model, scen, h=2e-3)
    scaled_input = SineDecayInput(amplitude=30.0, omega=30.0, lam=1.0)
    scen3 = Scenario(signal=scen.signal, input=scaled_input,
                     horizon=scen.horizon)
    tripled = simulate_switched(model, scen3, h=2e-3)
    assert np.allclose(tripled.y, 3.0 * base.y, rtol=1e-12, atol=1e-12)


# ---------------------------------------------------------------------------
# switching behavior


def test_grid_hits_switch_instants_and_horizon():
    scen = example2_scenario()
    traj = simulate_switched(example2(5), scen, h=1e-2)
    for b in scen.signal.boundaries:
        assert np.any(traj.t == b), f"boundary {b} missing from the grid"
    assert traj.t[-1] == scen.horizon
    assert np.all(np.diff(traj.t) > 0)


def test_mode_labels_follow_incoming_convention():
    scen = example2_scenario()
    traj = simulate_switched(example2(5), scen, h=1e-2)
    i = int(np.flatnonzero(traj.t == 0.5)[0])
    assert traj.mode[i] == 2
    assert traj.mode[i - 1] == 1
    j = int(np.flatnonzero(traj.t == 2.0)[0])
    assert traj.mode[j] == 1


def test_output_uses_incoming_mode_matrix():
    # C differs per mode, so the boundary row reveals which C was applied
    A = -np.eye(1)
    B = np.ones((1, 1))
    model = LssModel((
        Mode(A=A, B=B, C=np.array([[1.0]])),
        Mode(A=A, B=B, C=np.array([[-5.0]])),
    ))
    sig = SwitchingSignal([(0.5, 1), (1.0, 2)])
    scen = Scenario(signal=sig, input=ConstantInput(np.array([1.0])),
                    horizon=1.0)
    traj = simulate_switched(model, scen, h=1e-2)
    i = int(np.flatnonzero(traj.t == 0.5)[0])
    assert traj.y[i, 0] == pytest.approx(-5.0 * traj.x[i, 0])
    assert traj.y[i - 1, 0] == pytest.approx(traj.x[i - 1, 0])


def test_state_is_continuous_across_switches():
    model = example2(8)
    scen = example2_scenario()
    traj = simulate_switched(model, scen, h=1e-3)
    jumps = np.abs(np.diff(traj.x, axis=0)).max(axis=1)
    # every increment is an integration step, never a reset
    assert jumps.max() <= 20.0 * 1e-3 * max(1.0, np.abs(traj.x).max())


def test_switched_and_bilinear_agree():
    rng = np.random.default_rng(44)
    for _ in range(8):
        n = int(rng.integers(2, 7))
        M = int(rng.integers(1, 4))
        model = random_stable_model(rng, n=n, n_modes=M, m=2, p=2)
        t1 = float(rng.uniform(0.2, 0.8))
        t2 = t1 + float(rng.uniform(0.2, 0.8))
        sig = SwitchingSignal([
            (t1, int(rng.integers(1, M + 1))),
            (t2, int(rng.integers(1, M + 1))),
            (t2 + 0.5, int(rng.integers(1, M + 1))),
        ])
        scen = Scenario(signal=sig, input=SineDecayInput(1.0, 3.0, 0.2),
                        horizon=t2 + 0.5,
                        x0=rng.standard_normal(n))
        a = simulate_switched(model, scen, h=1e-3)
        b = simulate_bilinear(bilinear_embed(model), scen, h=1e-3)
        assert np.array_equal(a.t, b.t)
        assert np.abs(a.y - b.y).max() <= 1e-8
        assert np.abs(a.x - b.x).max() <= 1e-8


def test_unknown_mode_in_signal_rejected():
    model = example2(4)
    sig = SwitchingSignal([(1.0, 3)])
    scen = Scenario(signal=sig, input=ZeroInput(), horizon=1.0)
    with pytest.raises(ValueError):
        simulate_switched(model, scen, h=1e-2)


def test_overflow_reports_time():
    model = _single_mode([[5.0]], [[0.0]], [[1.0]])
    scen = Scenario(signal=_hold(t_end=200.0), input=ZeroInput(),
                    horizon=200.0, x0=np.array([1.0]))
    with pytest.raises(SimulationOverflowError) as info:
        simulate_switched(model, scen, h=0.5)
    assert info.value.t is not None
    assert 0.0 < info.value.t <= 200.0


def test_step_size_must_be_positive():
    model = example2(4)
    scen = example2_scenario()
    with pytest.raises(ValueError):
        simulate_switched(model, scen, h=0.0)


# ---------------------------------------------------------------------------
# input L2 norms


def test_l2_norm_zero_and_constant():
    assert l2_norm_input(ZeroInput()) == 0.0
    c = ConstantInput(np.array([3.0, 4.0]))
    assert l2_norm_input(c, horizon=4.0) == pytest.approx(10.0)
    with pytest.raises(ValueError):
        l2_norm_input(c)


def test_l2_norm_decaying_sine_infinite_horizon():
    # a^2 omega^2 / (4 lam (lam^2 + omega^2)) per channel
    u = SineDecayInput(amplitude=10.0, omega=30.0, lam=1.0)
    expect = 10.0 * math.sqrt(225.0 / 901.0)
    assert l2_norm_input(u) == pytest.approx(expect, rel=1e-12)


def test_l2_norm_decaying_sine_against_quadrature():
    cases = [
        (1.0, 1.0, 1.0, math.inf),
        (2.0, 5.0, 0.7, math.inf),
        (1.0, 1.0, 1.0, 2.5),
        (3.0, 12.0, 0.0, 4.0),
        (1.5, 0.0, 0.4, 3.0),
    ]
    for a, omega, lam, T in cases:
        u = SineDecayInput(amplitude=a, omega=omega, lam=lam)
        upper = 60.0 if math.isinf(T) else T
        val, err = scipy.integrate.quad(
            lambda t: (a * math.sin(omega * t) * math.exp(-lam * t)) ** 2,
            0.0, upper, limit=400)
        assert l2_norm_input(u, horizon=T) == pytest.approx(
            math.sqrt(val), rel=1e-8, abs=1e-10), (a, omega, lam, T)


def test_l2_norm_sine_without_decay_diverges():
    u = SineDecayInput(amplitude=1.0, omega=2.0, lam=0.0)
    with pytest.raises(ValueError):
        l2_norm_input(u)
    # finite horizons stay fine
    assert l2_norm_input(u, horizon=1.0) > 0.0


def test_l2_norm_multichannel_mask():
    u = SineDecayInput(amplitude=2.0, omega=3.0, lam=0.5,
                       mask=np.array([1.0, 0.0, 1.0]))
    per = l2_norm_input(SineDecayInput(amplitude=2.0, omega=3.0, lam=0.5),
                        n_channels=1)
    assert l2_norm_input(u, n_channels=3) == pytest.approx(
        per * math.sqrt(2.0), rel=1e-12)


def test_l2_norm_sampled_input():
    t = np.linspace(0.0, 2.0, 2001)
    vals = np.exp(-t)[:, None]
    u = SampledInput(t, vals)
    expect = math.sqrt((1.0 - math.exp(-4.0)) / 2.0)
    assert l2_norm_input(u, horizon=2.0) == pytest.approx(expect, rel=1e-5)
    with pytest.raises(ValueError):
        l2_norm_input(u)


# ---------------------------------------------------------------------------
# output norms and the error summary


def test_l2_norm_output_constant_one():
    t = np.linspace(0.0, 1.0, 101)
    traj = Trajectory(t=t, x=np.zeros((101, 1)), y=np.ones((101, 1)),
                      mode=np.ones(101, dtype=int))
    assert l2_norm_output(traj) == pytest.approx(1.0, rel=1e-12)


def test_l2_norm_output_exponential():
    t = np.linspace(0.0, 10.0, 10001)
    y = np.exp(-t)[:, None]
    traj = Trajectory(t=t, x=y, y=y, mode=np.ones_like(t, dtype=int))
    expect = math.sqrt((1.0 - math.exp(-20.0)) / 2.0)
    assert l2_norm_output(traj) == pytest.approx(expect, rel=1e-6)


def test_l2_norm_output_rejects_empty():
    traj = Trajectory(t=np.zeros(0), x=np.zeros((0, 1)), y=np.zeros((0, 1)),
                      mode=np.zeros(0, dtype=int))
    with pytest.raises(ValueError):
        l2_norm_output(traj)


def test_output_error_full_order_reduction_is_exact():
    model = example2(6)
    P = reach_gramian(model).matrix
    Q = obs_gramian(model).matrix
    red = balance_truncate(model, P, Q, r=6)
    summary = output_error(model, red.reduced, example2_scenario(), h=1e-3,
                           hsv=red.hsv)
    assert summary.l2_error <= 1e-8
    assert summary.bound == pytest.approx(0.0, abs=1e-12)
    assert summary.bound_satisfied


def test_output_error_reduced_order_with_bound():
    model = example2(10)
    P = reach_gramian(model).matrix
    Q = obs_gramian(model).matrix
    red = balance_truncate(model, P, Q, r=4)
    summary = output_error(model, red.reduced, example2_scenario(), h=1e-3,
                           hsv=red.hsv)
    assert summary.l2_error > 0.0
    assert summary.linf_error > 0.0
    assert summary.bound > 0.0
    # measured against the recomputed closed-form coefficient
    u_l2 = l2_norm_input(example2_scenario().input)
    assert summary.bound == pytest.approx(2.0 * red.hsv[4:].sum() * u_l2,
                                          rel=1e-12)
    assert summary.bound_satisfied == (summary.l2_error <= summary.bound *
                                       (1.0 + 1e-6) + 1e-12)


def test_output_error_rejects_mismatched_channels():
    model = example2(6)
    other = _single_mode([[-1.0]], [[1.0]], [[1.0], [2.0]])
    with pytest.raises(ValueError):
        output_error(model, other, example2_scenario())
