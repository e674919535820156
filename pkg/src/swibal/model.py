"""Data model for linear switched systems.

A switched system is a finite family of LTI modes (A_j, B_j, C_j) together
with a piecewise-constant switching signal selecting the active mode over
time. Modes are numbered 1..M everywhere in the public surface. This module
holds the containers, the bilinear embedding that turns mode indicators into
extra inputs, input signal variants, and JSON (de)serialization.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


def _as_matrix(a, name: str) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d matrix, got ndim={arr.ndim}")
    return arr


@dataclass(frozen=True)
class Mode:
    """One LTI mode (A, B, C)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray


class LssModel:
    """Continuous-time linear switched system with M modes.

    Parameters
    ----------
    modes : sequence of (A, B, C) triples or Mode objects
        Mode j dynamics ``x' = A_j x + B_j u``, ``y = C_j x``. All A_j must
        be n x n, B_j n x m, C_j p x n; consistency is diagnosed by
        `validate_model` rather than enforced at construction.
    label : str, optional
        Free-text tag carried through serialization.
    """

    def __init__(self, modes: Sequence, label: str = ""):
        if len(modes) == 0:
            raise ValueError("a switched system needs at least one mode")
        parsed = []
        for j, entry in enumerate(modes, start=1):
            if isinstance(entry, Mode):
                A, B, C = entry.A, entry.B, entry.C
            else:
                A, B, C = entry
            parsed.append(Mode(_as_matrix(A, f"A_{j}"),
                               _as_matrix(B, f"B_{j}"),
                               _as_matrix(C, f"C_{j}")))
        self.modes = tuple(parsed)
        self.label = label

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def n(self) -> int:
        return self.modes[0].A.shape[0]

    @property
    def m(self) -> int:
        return self.modes[0].B.shape[1]

    @property
    def p(self) -> int:
        return self.modes[0].C.shape[0]

    @property
    def A(self) -> list:
        return [mode.A for mode in self.modes]

    @property
    def B(self) -> list:
        return [mode.B for mode in self.modes]

    @property
    def C(self) -> list:
        return [mode.C for mode in self.modes]

    def __repr__(self) -> str:
        return (f"LssModel(n={self.n}, m={self.m}, p={self.p}, "
                f"n_modes={self.n_modes}, label={self.label!r})")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "p": self.p,
            "modes": [
                {"A": mode.A.tolist(), "B": mode.B.tolist(),
                 "C": mode.C.tolist()}
                for mode in self.modes
            ],
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LssModel":
        if "modes" not in data:
            raise ValueError("model document missing 'modes'")
        modes = []
        for j, entry in enumerate(data["modes"], start=1):
            for key in ("A", "B", "C"):
                if key not in entry:
                    raise ValueError(f"mode {j} missing matrix {key!r}")
            modes.append((entry["A"], entry["B"], entry["C"]))
        return cls(modes, label=data.get("label", ""))


@dataclass(frozen=True)
class BilinearEmbedding:
    """Switched system rewritten as a bilinear control system.

    The dynamics become ``x' = A x + sum_j q_j(t) (D_j x + B_j u)`` with
    A = A_1, D_j = A_j - A_1 and q_j the mode indicators; D_1 is the zero
    matrix but is kept in the list so that mode indexing stays 1-based.
    """

    A: np.ndarray
    D: tuple
    B: tuple
    C: tuple

    @property
    def n_modes(self) -> int:
        return len(self.D)

    @property
    def n(self) -> int:
        return self.A.shape[0]


def bilinear_embed(model: LssModel) -> BilinearEmbedding:
    """Embed a switched system into bilinear form with A = A_1 and
    D_j = A_j - A_1."""
    A = model.modes[0].A
    D = tuple(mode.A - A for mode in model.modes)
    B = tuple(mode.B for mode in model.modes)
    C = tuple(mode.C for mode in model.modes)
    return BilinearEmbedding(A=A, D=D, B=B, C=C)


@dataclass(frozen=True)
class Diagnostic:
    """One finding from model validation."""

    kind: str
    mode: Optional[int]
    message: str

    def __str__(self) -> str:
        where = f"mode {self.mode}: " if self.mode is not None else ""
        return f"[{self.kind}] {where}{self.message}"


def validate_model(model: LssModel) -> list:
    """Check dimension consistency, finiteness and the Hurwitz premise.

    Returns a list of Diagnostic entries; an empty list means every mode has
    consistent shapes, finite entries, and a Hurwitz A_j. Hurwitz verdicts
    report the spectral abscissa (largest eigenvalue real part).
    """
    diags = []
    n, m, p = model.n, model.m, model.p
    for j, mode in enumerate(model.modes, start=1):
        ok = True
        if mode.A.shape != (n, n):
            diags.append(Diagnostic("dimension", j,
                                    f"A_{j} has shape {mode.A.shape}, "
                                    f"expected ({n}, {n})"))
            ok = False
        if mode.B.shape != (n, m):
            diags.append(Diagnostic("dimension", j,
                                    f"B_{j} has shape {mode.B.shape}, "
                                    f"expected ({n}, {m})"))
            ok = False
        if mode.C.shape != (p, n):
            diags.append(Diagnostic("dimension", j,
                                    f"C_{j} has shape {mode.C.shape}, "
                                    f"expected ({p}, {n})"))
            ok = False
        for name, mat in (("A", mode.A), ("B", mode.B), ("C", mode.C)):
            if not np.isfinite(mat).all():
                diags.append(Diagnostic("nonfinite", j,
                                        f"{name}_{j} contains nonfinite "
                                        "entries"))
                ok = False
        if ok and mode.A.shape == (n, n):
            abscissa = float(np.max(np.linalg.eigvals(mode.A).real))
            if abscissa >= 0.0:
                diags.append(Diagnostic(
                    "not_hurwitz", j,
                    f"mode {j} not Hurwitz (spectral abscissa "
                    f"{abscissa:.6g})"))
    return diags


def spectral_abscissa(A: np.ndarray) -> float:
    """Largest real part over the eigenvalues of A."""
    return float(np.max(np.linalg.eigvals(np.asarray(A, dtype=float)).real))


@dataclass(frozen=True)
class SwitchingSignal:
    """Right-continuous piecewise-constant mode schedule.

    segments is an ordered list of (t_end, mode) pairs: the first segment
    covers [0, t_end_1), the next [t_end_1, t_end_2), and so on; the final
    mode is held for all later times. A switching instant belongs to the
    incoming mode.
    """

    segments: tuple

    def __init__(self, segments: Sequence):
        parsed = tuple((float(t_end), int(mode)) for t_end, mode in segments)
        if len(parsed) == 0:
            raise ValueError("switching signal needs at least one segment")
        ends = [t for t, _ in parsed]
        if any(b <= a for a, b in zip(ends, ends[1:])):
            raise ValueError("segment end times must be strictly increasing")
        if ends[0] <= 0.0:
            raise ValueError("first segment must end after t = 0")
        if any(mode < 1 for _, mode in parsed):
            raise ValueError("mode indices are 1-based positive integers")
        object.__setattr__(self, "segments", parsed)

    @property
    def boundaries(self) -> np.ndarray:
        """Interior switch instants, excluding t = 0 and the final end."""
        return np.array([t for t, _ in self.segments[:-1]])

    def to_list(self) -> list:
        return [{"t_end": t, "mode": mode} for t, mode in self.segments]


def mode_at(signal: SwitchingSignal, t: float):
    """Active mode at time t (scalar or array), right-continuous.

    A switch instant returns the new segment's mode; times beyond the last
    declared boundary return the final mode.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0):
        raise ValueError("mode_at requires t >= 0")
    ends = np.array([seg[0] for seg in signal.segments])
    modes = np.array([seg[1] for seg in signal.segments])
    # segment i covers [ends[i-1], ends[i]); searchsorted side='right' sends
    # a boundary time into the next (incoming) segment
    idx = np.searchsorted(ends, t_arr, side="right")
    idx = np.minimum(idx, len(modes) - 1)
    picked = modes[idx]
    if t_arr.ndim == 0:
        return int(picked)
    return picked


class InputSignal:
    """Base class for input signals u(t) taking values in R^m."""

    def sample(self, t, m: int) -> np.ndarray:
        """Evaluate at time(s) t; returns shape (m,) for scalar t, else
        (len(t), m)."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


class ZeroInput(InputSignal):
    def sample(self, t, m: int) -> np.ndarray:
        t_arr = np.asarray(t, dtype=float)
        if t_arr.ndim == 0:
            return np.zeros(m)
        return np.zeros((t_arr.size, m))

    def to_dict(self) -> dict:
        return {"type": "zero"}


class ConstantInput(InputSignal):
    def __init__(self, value):
        self.value = np.atleast_1d(np.asarray(value, dtype=float))

    def sample(self, t, m: int) -> np.ndarray:
        if self.value.size != m:
            raise ValueError(f"constant input has {self.value.size} "
                             f"channels, model expects {m}")
        t_arr = np.asarray(t, dtype=float)
        if t_arr.ndim == 0:
            return self.value.copy()
        return np.tile(self.value, (t_arr.size, 1))

    def to_dict(self) -> dict:
        return {"type": "constant", "value": self.value.tolist()}


class SineDecayInput(InputSignal):
    """u_i(t) = a sin(omega t) exp(-lam t) on the channels selected by mask
    (all channels when mask is None)."""

    def __init__(self, amplitude: float, omega: float, lam: float,
                 mask=None):
        self.amplitude = float(amplitude)
        self.omega = float(omega)
        self.lam = float(lam)
        self.mask = None if mask is None else np.asarray(mask, dtype=bool)

    def scalar_wave(self, t):
        t_arr = np.asarray(t, dtype=float)
        return (self.amplitude * np.sin(self.omega * t_arr)
                * np.exp(-self.lam * t_arr))

    def _channel_flags(self, m: int) -> np.ndarray:
        if self.mask is None:
            return np.ones(m, dtype=bool)
        if self.mask.size != m:
            raise ValueError(f"channel mask has {self.mask.size} entries, "
                             f"model expects {m}")
        return self.mask

    def sample(self, t, m: int) -> np.ndarray:
        flags = self._channel_flags(m)
        wave = self.scalar_wave(t)
        t_arr = np.asarray(t, dtype=float)
        if t_arr.ndim == 0:
            return np.where(flags, wave, 0.0)
        out = np.zeros((t_arr.size, m))
        out[:, flags] = wave[:, None]
        return out

    def to_dict(self) -> dict:
        doc = {"type": "sine_decay", "amplitude": self.amplitude,
               "omega": self.omega, "lambda": self.lam}
        if self.mask is not None:
            doc["mask"] = [bool(v) for v in self.mask]
        return doc


class SampledInput(InputSignal):
    """Piecewise-linear interpolant of samples on a strictly increasing time
    grid; held constant outside the grid."""

    def __init__(self, t_grid, values):
        self.t_grid = np.asarray(t_grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        self.values = values
        if self.t_grid.ndim != 1 or self.t_grid.size < 2:
            raise ValueError("sampled input needs at least two grid points")
        if np.any(np.diff(self.t_grid) <= 0):
            raise ValueError("sampled input grid must be strictly increasing")
        if self.values.shape[0] != self.t_grid.size:
            raise ValueError("sampled input values must have one row per "
                             "grid point")

    def sample(self, t, m: int) -> np.ndarray:
        if self.values.shape[1] != m:
            raise ValueError(f"sampled input has {self.values.shape[1]} "
                             f"channels, model expects {m}")
        t_arr = np.asarray(t, dtype=float)
        cols = [np.interp(t_arr, self.t_grid, self.values[:, i])
                for i in range(m)]
        out = np.stack(cols, axis=-1)
        return out

    def to_dict(self) -> dict:
        return {"type": "sampled", "t": self.t_grid.tolist(),
                "values": self.values.tolist()}


def input_from_dict(doc: dict) -> InputSignal:
    kind = doc.get("type")
    if kind == "zero":
        return ZeroInput()
    if kind == "constant":
        if "value" not in doc:
            raise ValueError("constant input requires 'value'")
        return ConstantInput(doc["value"])
    if kind == "sine_decay":
        for key in ("amplitude", "omega", "lambda"):
            if key not in doc:
                raise ValueError(f"sine_decay input requires {key!r}")
        return SineDecayInput(doc["amplitude"], doc["omega"], doc["lambda"],
                              mask=doc.get("mask"))
    if kind == "sampled":
        for key in ("t", "values"):
            if key not in doc:
                raise ValueError(f"sampled input requires {key!r}")
        return SampledInput(doc["t"], doc["values"])
    raise ValueError(f"unknown input type {kind!r}")


@dataclass
class Scenario:
    """A simulation experiment: switching signal, input, horizon and initial
    state (zero when omitted)."""

    signal: SwitchingSignal
    input: InputSignal
    horizon: float
    x0: Optional[np.ndarray] = None

    def __post_init__(self):
        self.horizon = float(self.horizon)
        if self.horizon <= 0.0:
            raise ValueError("horizon must be positive")
        if self.x0 is not None:
            self.x0 = np.asarray(self.x0, dtype=float)

    def to_dict(self) -> dict:
        doc = {
            "horizon": self.horizon,
            "switching": self.signal.to_list(),
            "input": self.input.to_dict(),
        }
        if self.x0 is not None:
            doc["x0"] = self.x0.tolist()
        return doc

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        for key in ("horizon", "switching", "input"):
            if key not in data:
                raise ValueError(f"scenario document missing {key!r}")
        segments = []
        for i, seg in enumerate(data["switching"], start=1):
            if "t_end" not in seg or "mode" not in seg:
                raise ValueError(f"switching segment {i} needs 't_end' and "
                                 "'mode'")
            segments.append((seg["t_end"], seg["mode"]))
        return cls(signal=SwitchingSignal(segments),
                   input=input_from_dict(data["input"]),
                   horizon=data["horizon"],
                   x0=data.get("x0"))


def extended_input(input_signal: InputSignal, signal: SwitchingSignal,
                   t: float, m: int, n_modes: int) -> np.ndarray:
    """Extended input of the bilinear form at time t: the first m entries
    are u(t), entry m+j is the indicator of mode j. Exactly one indicator
    entry is 1."""
    u = input_signal.sample(t, m)
    t_arr = np.asarray(t, dtype=float)
    active = mode_at(signal, t)
    if np.any(np.asarray(active) > n_modes):
        raise ValueError(f"switching signal uses a mode beyond the declared "
                         f"{n_modes} modes")
    if t_arr.ndim == 0:
        out = np.zeros(m + n_modes)
        out[:m] = u
        out[m + active - 1] = 1.0
        return out
    out = np.zeros((t_arr.size, m + n_modes))
    out[:, :m] = u
    out[np.arange(t_arr.size), m + np.asarray(active) - 1] = 1.0
    return out


def _atomic_write_text(path: str, text: str) -> None:
    """Write text to path via a temp file and rename, so readers never see a
    partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def save_model(model: LssModel, path: str) -> None:
    """Serialize a model to JSON with full floating-point precision."""
    _atomic_write_text(path, json.dumps(model.to_dict(), indent=2) + "\n")


def load_model(path: str) -> LssModel:
    with open(path) as fh:
        return LssModel.from_dict(json.load(fh))


def save_scenario(scenario: Scenario, path: str) -> None:
    _atomic_write_text(path, json.dumps(scenario.to_dict(), indent=2) + "\n")


def load_scenario(path: str) -> Scenario:
    with open(path) as fh:
        return Scenario.from_dict(json.load(fh))
