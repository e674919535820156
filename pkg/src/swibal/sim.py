"""Time-domain simulation of switched systems and L2 error evaluation.

Switch instants are known a priori, so each constant-mode segment is
integrated with a fixed-step classical RK4 on its own uniform grid (the
segment is subdivided into ceil(length/h) steps, making every switch
instant a grid point) and the segments are concatenated. The state is
continuous across switches; outputs at a switch instant use the incoming
mode's C, matching the right-continuity of the switching signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .balred import error_bound
from .exceptions import SimulationOverflowError
from .model import (
    BilinearEmbedding,
    ConstantInput,
    InputSignal,
    LssModel,
    SampledInput,
    Scenario,
    SineDecayInput,
    ZeroInput,
    extended_input,
    mode_at,
)


@dataclass
class Trajectory:
    """Sampled solution: time grid, states, outputs, and the active mode at
    every grid point."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    mode: np.ndarray


@dataclass
class ErrorSummary:
    """Output error between two models under one scenario, with the
    a-priori bound when the Hankel singular values were supplied."""

    l2_error: float
    linf_error: float
    bound: Optional[float]
    bound_satisfied: Optional[bool]


def _segments(scenario: Scenario) -> list:
    """Constant-mode intervals covering [0, horizon] as (start, end, mode)
    triples; the final declared mode is held beyond the last boundary."""
    T = scenario.horizon
    interior = [t for t in scenario.signal.boundaries if 0.0 < t < T]
    edges = [0.0] + interior + [T]
    return [(a, b, mode_at(scenario.signal, a))
            for a, b in zip(edges, edges[1:])]


def _integrate(scenario: Scenario, n: int, m: int, matrices_for_segment,
               h: float):
    """Run the segment integrator; matrices_for_segment(t_start, mode) ->
    (A, B). Returns (t grid, state array)."""
    if h <= 0.0:
        raise ValueError("step size h must be positive")
    x0 = scenario.x0 if scenario.x0 is not None else np.zeros(n)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (n,):
        raise ValueError(f"x0 has shape {x0.shape}, expected ({n},)")
    t_parts = []
    x_parts = []
    x_cur = x0
    for seg_idx, (a, b, mode) in enumerate(_segments(scenario)):
        A, B = matrices_for_segment(a, mode)
        steps = max(1, math.ceil((b - a) / h - 1e-12))
        dt = (b - a) / steps
        t_seg = a + dt * np.arange(steps + 1)
        t_seg[-1] = b
        t_stage = a + 0.5 * dt * np.arange(2 * steps + 1)
        t_stage[-1] = b
        u_stages = scenario.input.sample(t_stage, m)
        x_seg = _kernels.rk4_segment(A, B, u_stages, x_cur, dt, steps)
        finite = np.isfinite(x_seg).all(axis=1)
        if not finite.all():
            bad = int(np.argmin(finite))
            t_bad = float(t_seg[bad])
            raise SimulationOverflowError(
                f"state became nonfinite at t = {t_bad:.6g}", t=t_bad)
        x_cur = x_seg[-1]
        if seg_idx == 0:
            t_parts.append(t_seg)
            x_parts.append(x_seg)
        else:
            t_parts.append(t_seg[1:])
            x_parts.append(x_seg[1:])
    return np.concatenate(t_parts), np.vstack(x_parts)


def _label_and_output(t: np.ndarray, x: np.ndarray, scenario: Scenario,
                      C_list: list) -> Trajectory:
    labels = np.asarray(mode_at(scenario.signal, t))
    p = C_list[0].shape[0]
    y = np.zeros((t.size, p))
    for j, Cj in enumerate(C_list, start=1):
        rows = labels == j
        if rows.any():
            y[rows] = x[rows] @ Cj.T
    return Trajectory(t=t, x=x, y=y, mode=labels)


def simulate_switched(model: LssModel, scenario: Scenario,
                      h: float = 1e-3) -> Trajectory:
    """Integrate the switched dynamics x' = A_q x + B_q u over the scenario
    horizon."""
    n_modes = model.n_modes

    def matrices(t_start: float, mode: int):
        del t_start
        if not 1 <= mode <= n_modes:
            raise ValueError(f"switching signal uses mode {mode}, model has "
                             f"{n_modes} modes")
        return model.modes[mode - 1].A, model.modes[mode - 1].B

    t, x = _integrate(scenario, model.n, model.m, matrices, h)
    return _label_and_output(t, x, scenario, [mo.C for mo in model.modes])


def simulate_bilinear(embedding: BilinearEmbedding, scenario: Scenario,
                      h: float = 1e-3) -> Trajectory:
    """Integrate the bilinear form x' = A x + sum_j q_j (D_j x + B_j u).

    The indicators are constant within a segment, so the effective segment
    dynamics are (A + D_q, B_q) with q read off the indicator block of the
    extended input at the segment start."""
    m = embedding.B[0].shape[1]
    n_modes = embedding.n_modes

    def matrices(t_start: float, mode: int):
        del mode
        ext = extended_input(scenario.input, scenario.signal, t_start, m,
                             n_modes)
        q = int(np.argmax(ext[m:])) + 1
        return embedding.A + embedding.D[q - 1], embedding.B[q - 1]

    t, x = _integrate(scenario, embedding.n, m, matrices, h)
    return _label_and_output(t, x, scenario, list(embedding.C))


def l2_norm_input(input_signal: InputSignal, horizon: float = math.inf,
                  n_channels: Optional[int] = None) -> float:
    """L2 norm of an input signal over [0, horizon].

    Closed forms are used where they exist (the decaying-sine variants and
    constants); sampled inputs are integrated by the trapezoid rule on
    their own grid. Infinite horizons are rejected when the integral
    diverges.
    """
    if isinstance(input_signal, ZeroInput):
        return 0.0
    if isinstance(input_signal, ConstantInput):
        v_norm = float(np.linalg.norm(input_signal.value))
        if math.isinf(horizon):
            if v_norm == 0.0:
                return 0.0
            raise ValueError("constant input has divergent L2 norm on an "
                             "infinite horizon")
        return v_norm * math.sqrt(horizon)
    if isinstance(input_signal, SineDecayInput):
        a = input_signal.amplitude
        omega = input_signal.omega
        lam = input_signal.lam
        if input_signal.mask is not None:
            channels = int(np.count_nonzero(input_signal.mask))
        else:
            channels = 1 if n_channels is None else n_channels
        if channels == 0 or a == 0.0 or omega == 0.0:
            return 0.0
        if math.isinf(horizon):
            if lam <= 0.0:
                raise ValueError("sine input with decay <= 0 has divergent "
                                 "L2 norm on an infinite horizon")
            per = a * a * omega * omega / (4.0 * lam * (lam * lam
                                                        + omega * omega))
        else:
            T = float(horizon)
            if lam == 0.0:
                per = 0.5 * a * a * (T - math.sin(2.0 * omega * T)
                                     / (2.0 * omega))
            else:
                s = 2.0 * lam
                z = complex(-s, 2.0 * omega)
                bracket = (1.0 - math.exp(-s * T)) / s \
                    - ((np.exp(z * T) - 1.0) / z).real
                per = 0.5 * a * a * bracket
        return math.sqrt(channels * per)
    if isinstance(input_signal, SampledInput):
        if math.isinf(horizon):
            raise ValueError("sampled inputs support finite horizons only")
        m = input_signal.values.shape[1]
        ts = input_signal.t_grid
        interior = ts[(ts > 0.0) & (ts < horizon)]
        grid = np.concatenate(([0.0], interior, [horizon]))
        u = input_signal.sample(grid, m)
        sq = (u * u).sum(axis=1)
        return float(math.sqrt(np.trapezoid(sq, grid)))
    raise TypeError(f"unsupported input signal {type(input_signal).__name__}")


def l2_norm_output(traj: Trajectory) -> float:
    """Trapezoid-rule L2 norm of the trajectory's output over its grid."""
    if traj.t.size == 0:
        raise ValueError("trajectory grid is empty")
    sq = (traj.y * traj.y).sum(axis=1)
    return float(math.sqrt(np.trapezoid(sq, traj.t)))


def output_error(model: LssModel, reduced: LssModel, scenario: Scenario,
                 h: float = 1e-3, hsv: Optional[np.ndarray] = None,
                 u_l2: Optional[float] = None) -> ErrorSummary:
    """Simulate both models on the identical grid and integrate the output
    difference.

    When hsv is given, the a-priori bound for the reduced order (the
    reduced model's dimension) is evaluated against the measured error;
    the input norm defaults to the infinite-horizon closed form, falling
    back to the scenario horizon when that diverges.
    """
    if model.p != reduced.p or model.m != reduced.m:
        raise ValueError("models must share input and output dimensions")
    traj = simulate_switched(model, scenario, h)
    traj_red = simulate_switched(reduced, scenario, h)
    diff = traj.y - traj_red.y
    sq = (diff * diff).sum(axis=1)
    l2 = float(math.sqrt(np.trapezoid(sq, traj.t)))
    linf = float(np.sqrt(sq.max()))
    bound = None
    satisfied = None
    if hsv is not None:
        if u_l2 is None:
            try:
                u_l2 = l2_norm_input(scenario.input, math.inf,
                                     n_channels=model.m)
            except ValueError:
                u_l2 = l2_norm_input(scenario.input, scenario.horizon,
                                     n_channels=model.m)
        bound = error_bound(hsv, reduced.n, u_l2)
        satisfied = bool(l2 <= bound * (1.0 + 1e-6) + 1e-12)
    return ErrorSummary(l2_error=l2, linf_error=linf, bound=bound,
                        bound_satisfied=satisfied)
