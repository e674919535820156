"""Command-line surface for the analysis/reduction/simulation pipeline.

Exit codes: 0 on success, 1 on usage errors (bad flags, unreadable or
malformed files), 2 on numerical failures (solver exceptions). All output
files are written atomically and are byte-identical across runs for
identical inputs, flags and seed.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .balred import balance_truncate, hankel_singular_values
from .exceptions import SwibalError
from .families import (
    example1,
    example2,
    example2_scenario,
    random_rank_stable_model,
)
from .gramians import (
    averaged_gramians,
    obs_gramian,
    range_basis,
    reach_gramian,
    subspace_contains,
    max_principal_angle,
)
from .lyapsolve import GenSolveOptions, existence_margin
from .model import (
    LssModel,
    bilinear_embed,
    load_model,
    load_scenario,
    save_model,
    save_scenario,
    validate_model,
    _atomic_write_text,
)
from .oracle import observable_space_bruteforce, reachable_space_bruteforce
from .sim import l2_norm_input, output_error, simulate_switched

log = logging.getLogger("swibal")


@dataclass
class RunConfig:
    """Parsed invocation: the subcommand, its input paths, the output
    directory and the numeric overrides."""

    command: str
    paths: list
    out: str
    method: str = "auto"
    rtol: float = 1e-10
    h: float = 1e-3
    r: Optional[int] = None
    energy_tol: Optional[float] = None
    kron_cap: int = 64
    baseline: str = "generalized"
    sweep: int = 0
    seed: int = 0
    states: bool = False
    n: int = 100
    name: str = ""


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; the contract here is
    status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _fmt(value: float) -> str:
    """Shortest round-trip decimal form; deterministic for equal values."""
    return repr(float(value))


def _write_csv(path: str, header: list, rows: list) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            cell if isinstance(cell, str) else _fmt(cell) for cell in row))
    _atomic_write_text(path, "\n".join(lines) + "\n")


def _write_json(path: str, doc: dict) -> None:
    _atomic_write_text(path, json.dumps(doc, indent=2) + "\n")


def _solve_options(cfg: RunConfig) -> GenSolveOptions:
    return GenSolveOptions(method=cfg.method, kron_cap=cfg.kron_cap)


def _load_checked_model(path: str) -> LssModel:
    model = load_model(path)
    hard = [d for d in validate_model(model)
            if d.kind in ("dimension", "nonfinite")]
    if hard:
        raise ValueError("; ".join(str(d) for d in hard))
    return model


def cmd_analyze(cfg: RunConfig) -> int:
    model = _load_checked_model(cfg.paths[0])
    opts = _solve_options(cfg)
    P = reach_gramian(model, opts)
    Q = obs_gramian(model, opts)
    reach = range_basis(P.matrix, rtol=cfg.rtol)
    obs = range_basis(Q.matrix, rtol=cfg.rtol)
    emb = bilinear_embed(model)
    margin = existence_margin(emb.A, list(emb.D))
    avg = averaged_gramians(model)
    avg_reach = range_basis(avg.P, rtol=cfg.rtol)
    avg_obs = range_basis(avg.Q, rtol=cfg.rtol)
    reach_contained = subspace_contains(avg_reach, reach)
    obs_contained = subspace_contains(avg_obs, obs)

    def _side(result, basis):
        return {
            "rank": basis.rank,
            "complete": basis.rank == model.n,
            "residual": result.report.residual,
            "method": result.report.method,
            "iterations": result.report.iterations,
            "converged": result.report.converged,
        }

    report = {
        "label": model.label,
        "n": model.n,
        "m": model.m,
        "p": model.p,
        "n_modes": model.n_modes,
        "reachability": _side(P, reach),
        "observability": _side(Q, obs),
        "existence": {
            "alpha": margin.alpha,
            "beta": margin.beta,
            "lhs": margin.lhs,
            "rhs": margin.rhs,
            "satisfied": margin.satisfied,
            "heuristic": margin.heuristic,
        },
        "averaged": {
            "rank_reach": avg_reach.rank,
            "rank_obs": avg_obs.rank,
            "reach_contained_in_generalized": reach_contained,
            "obs_contained_in_generalized": obs_contained,
        },
    }
    path = os.path.join(cfg.out, "analysis.json")
    _write_json(path, report)

    label = model.label or cfg.paths[0]
    print(f"model {label}: n={model.n}, m={model.m}, p={model.p}, "
          f"modes={model.n_modes}")
    for kind, basis, res in (("reachability", reach, P),
                             ("observability", obs, Q)):
        verdict = ("completely" if basis.rank == model.n else
                   "not completely")
        noun = kind[:-5] + "le"
        print(f"{kind}: rank {basis.rank} of {model.n} -> {verdict} {noun} "
              f"(residual {res.report.residual:.3e}, "
              f"method {res.report.method})")
    word = "satisfied" if margin.satisfied else "not satisfied"
    kindword = "heuristic" if margin.heuristic else "exact"
    print(f"existence margin: lhs {margin.lhs:.6g} vs rhs {margin.rhs:.6g} "
          f"-> {word} ({kindword} beta {margin.beta:.6g})")
    print(f"averaged Gramians: rank {avg_reach.rank} (reach), "
          f"{avg_obs.rank} (obs); contained in generalized ranges: "
          f"{reach_contained}, {obs_contained}")
    print(f"wrote {path}")
    return 0


def cmd_reduce(cfg: RunConfig) -> int:
    model = _load_checked_model(cfg.paths[0])
    if (cfg.r is None) == (cfg.energy_tol is None):
        raise ValueError("give exactly one of --r and --tol")
    opts = _solve_options(cfg)
    if cfg.baseline == "averaged":
        avg = averaged_gramians(model)
        P_mat, Q_mat = avg.P, avg.Q
        source = "averaged"
    else:
        P_mat = reach_gramian(model, opts).matrix
        Q_mat = obs_gramian(model, opts).matrix
        source = "generalized"
    red = balance_truncate(model, P_mat, Q_mat, r=cfg.r,
                           energy_tol=cfg.energy_tol, rtol=cfg.rtol)

    model_path = os.path.join(cfg.out, "reduced.json")
    save_model(red.reduced, model_path)
    hsv_path = os.path.join(cfg.out, "hsv.csv")
    _write_csv(hsv_path, ["index", "sigma"],
               [(str(i + 1), s) for i, s in enumerate(red.hsv)])
    bound_path = os.path.join(cfg.out, "bound.txt")
    _atomic_write_text(bound_path, "".join([
        f"gramians = {source}\n",
        f"r = {red.r}\n",
        f"bound_coefficient = {_fmt(red.bound_coefficient)}\n",
        "note: l2 output error <= bound_coefficient * l2 input norm\n",
    ]))
    print(f"reduced {model.label or cfg.paths[0]} from n={model.n} to "
          f"r={red.r} ({source} Gramians)")
    print(f"wrote {model_path}")
    print(f"wrote {hsv_path}")
    print(f"wrote {bound_path}")
    return 0


def cmd_simulate(cfg: RunConfig) -> int:
    model = _load_checked_model(cfg.paths[0])
    scenario = load_scenario(cfg.paths[1])
    traj = simulate_switched(model, scenario, h=cfg.h)
    header = ["t", "mode"] + [f"y_{i + 1}" for i in range(model.p)]
    if cfg.states:
        header += [f"x_{i + 1}" for i in range(model.n)]
    rows = []
    for i in range(traj.t.size):
        row = [_fmt(traj.t[i]), str(int(traj.mode[i]))]
        row.extend(traj.y[i])
        if cfg.states:
            row.extend(traj.x[i])
        rows.append(row)
    path = os.path.join(cfg.out, "trajectory.csv")
    _write_csv(path, header, rows)
    print(f"wrote {path} ({traj.t.size} rows)")
    return 0


def cmd_compare(cfg: RunConfig) -> int:
    model = _load_checked_model(cfg.paths[0])
    scenario = load_scenario(cfg.paths[-1])
    reduced_models = [_load_checked_model(p) for p in cfg.paths[1:-1]]
    opts = _solve_options(cfg)
    P = reach_gramian(model, opts).matrix
    Q = obs_gramian(model, opts).matrix
    hsv = hankel_singular_values(P, Q, rtol=cfg.rtol)
    try:
        u_l2 = l2_norm_input(scenario.input, math.inf, n_channels=model.m)
    except ValueError:
        u_l2 = l2_norm_input(scenario.input, scenario.horizon,
                             n_channels=model.m)
    rows = []
    print(f"{'model':<28} {'r':>4} {'l2_error':>12} {'bound':>12} "
          "bound_satisfied")
    for path, red in zip(cfg.paths[1:-1], reduced_models):
        summary = output_error(model, red, scenario, h=cfg.h, hsv=hsv,
                               u_l2=u_l2)
        label = red.label or path
        rows.append((label, str(red.n), summary.l2_error,
                     summary.linf_error, summary.bound,
                     str(summary.bound_satisfied)))
        print(f"{label:<28} {red.n:>4} {summary.l2_error:>12.4e} "
              f"{summary.bound:>12.4e} {summary.bound_satisfied}")
    out_path = os.path.join(cfg.out, "errors.csv")
    _write_csv(out_path,
               ["label", "r", "l2_error", "linf_error", "bound",
                "bound_satisfied"],
               rows)
    print(f"wrote {out_path}")
    return 0


def _oracle_check(model: LssModel, rtol: float, tol: float = 1e-8):
    """Compare Gramian ranges against the closure subspaces; returns
    (reach ok, obs ok, details)."""
    P = reach_gramian(model).matrix
    Q = obs_gramian(model).matrix
    reach = range_basis(P, rtol=rtol)
    obs = range_basis(Q, rtol=rtol)
    reach_oracle = reachable_space_bruteforce(model).basis
    obs_oracle = observable_space_bruteforce(model).basis
    a_reach = max_principal_angle(reach, reach_oracle)
    a_obs = max_principal_angle(obs, obs_oracle)
    ok_reach = reach.rank == reach_oracle.rank and a_reach < tol
    ok_obs = obs.rank == obs_oracle.rank and a_obs < tol
    details = (reach.rank, reach_oracle.rank, a_reach,
               obs.rank, obs_oracle.rank, a_obs)
    return ok_reach, ok_obs, details


def cmd_oracle(cfg: RunConfig) -> int:
    if cfg.sweep > 0:
        rng = np.random.default_rng(cfg.seed)
        mismatches = 0
        for i in range(cfg.sweep):
            model = random_rank_stable_model(rng)
            ok_reach, ok_obs, details = _oracle_check(model, cfg.rtol)
            if not (ok_reach and ok_obs):
                mismatches += 1
                print(f"instance {i}: MISMATCH "
                      f"(reach {details[0]} vs {details[1]}, angle "
                      f"{details[2]:.3e}; obs {details[3]} vs {details[4]}, "
                      f"angle {details[5]:.3e})")
        print(f"sweep: {cfg.sweep} instances, {mismatches} mismatches")
        return 0
    model = _load_checked_model(cfg.paths[0])
    ok_reach, ok_obs, details = _oracle_check(model, cfg.rtol)
    for name, ok, rank, orank, angle in (
            ("reachability", ok_reach, details[0], details[1], details[2]),
            ("observability", ok_obs, details[3], details[4], details[5])):
        word = "MATCH" if ok else "MISMATCH"
        print(f"{name}: {word}, rank {rank} (Gramian) vs {orank} (closure), "
              f"max principal angle {angle:.3e}")
    return 0


def cmd_example(cfg: RunConfig) -> int:
    if cfg.name == "example1":
        model_path = os.path.join(cfg.out, "example1.json")
        save_model(example1(), model_path)
        print(f"wrote {model_path}")
        return 0
    model_path = os.path.join(cfg.out, "example2.json")
    save_model(example2(cfg.n), model_path)
    scenario_path = os.path.join(cfg.out, "example2_scenario.json")
    save_scenario(example2_scenario(), scenario_path)
    print(f"wrote {model_path}")
    print(f"wrote {scenario_path}")
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--rtol", type=float, default=1e-10,
                        help="relative rank tolerance")
    parser.add_argument("--method", default="auto",
                        choices=["kron", "fixedpoint", "auto"],
                        help="generalized solver")
    parser.add_argument("--kron-cap", type=int, default=64,
                        help="largest n for the Kronecker solver")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="swibal",
                     description="Gramian analysis, balanced truncation and "
                                 "simulation for linear switched systems")
    parser.add_argument("--version", action="version",
                        version=f"swibal {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("analyze", help="Gramian ranks, reachability and "
                                       "observability verdicts")
    p.add_argument("model")
    _add_common(p)

    p = sub.add_parser("reduce", help="balanced truncation to a reduced "
                                      "model")
    p.add_argument("model")
    p.add_argument("--r", type=int, default=None, help="reduced order")
    p.add_argument("--tol", type=float, default=None,
                   help="singular value tail budget selecting the order")
    p.add_argument("--baseline", choices=["averaged"], default=None,
                   help="use averaged instead of generalized Gramians")
    _add_common(p)

    p = sub.add_parser("simulate", help="integrate a scenario and write the "
                                        "trajectory")
    p.add_argument("model")
    p.add_argument("scenario")
    p.add_argument("--h", type=float, default=1e-3, help="integrator step")
    p.add_argument("--states", action="store_true",
                   help="include state columns in the CSV")
    _add_common(p)

    p = sub.add_parser("compare", help="output error of reduced models "
                                       "against the original")
    p.add_argument("model")
    p.add_argument("reduced", nargs="+")
    p.add_argument("scenario")
    p.add_argument("--h", type=float, default=1e-3, help="integrator step")
    _add_common(p)

    p = sub.add_parser("oracle", help="check Gramian ranges against "
                                      "closure subspaces")
    p.add_argument("model", nargs="?", default=None)
    p.add_argument("--sweep", type=int, default=0,
                   help="run N random instances instead of a model file")
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("example", help="write a built-in example model")
    p.add_argument("name", choices=["example1", "example2"])
    p.add_argument("--n", type=int, default=100,
                   help="state dimension for example2")
    _add_common(p)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    paths = []
    for attr in ("model", "reduced", "scenario"):
        value = getattr(args, attr, None)
        if value is None:
            continue
        if isinstance(value, list):
            paths.extend(value)
        else:
            paths.append(value)
    return RunConfig(
        command=args.command,
        paths=paths,
        out=getattr(args, "out", "."),
        method=getattr(args, "method", "auto"),
        rtol=getattr(args, "rtol", 1e-10),
        h=getattr(args, "h", 1e-3),
        r=getattr(args, "r", None),
        energy_tol=getattr(args, "tol", None),
        kron_cap=getattr(args, "kron_cap", 64),
        baseline=getattr(args, "baseline", None) or "generalized",
        sweep=getattr(args, "sweep", 0),
        seed=getattr(args, "seed", 0),
        states=getattr(args, "states", False),
        n=getattr(args, "n", 100),
        name=getattr(args, "name", ""),
    )


_COMMANDS = {
    "analyze": cmd_analyze,
    "reduce": cmd_reduce,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "oracle": cmd_oracle,
    "example": cmd_example,
}


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("SWIBAL_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _config_from_args(args)
    if cfg.command == "oracle" and cfg.sweep <= 0 and not cfg.paths:
        print("swibal oracle: error: give a model file or --sweep N",
              file=sys.stderr)
        return 1
    try:
        return _COMMANDS[cfg.command](cfg)
    except SwibalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
