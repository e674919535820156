#!/usr/bin/env python3
"""Timing comparison of the compiled and reference kernel backends.

Runs the numerical hot paths (prepped Lyapunov solve, RK4 segment
integration) through both backends on identical inputs, reports wall-clock
medians and the agreement of the results, then times an end-to-end
generalized Gramian solve in a subprocess per backend so the import-time
selection via SWIBAL_KERNELS is exercised as well.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 20 50 100 200]
                                        [--repeats 5] [--end-to-end-n 200]
"""

import argparse
import os
import statistics
import subprocess
import sys
import time

import numpy as np

from swibal._kernels import _reference

try:
    from swibal._kernels import _compiled
except ImportError:
    _compiled = None


def _median_time(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def _stable_instance(rng, n: int):
    G = rng.standard_normal((n, n))
    A = 0.5 * (G - G.T) - (1.0 + np.abs(np.linalg.eigvals(G)).max()) * np.eye(n)
    F = rng.standard_normal((n, n))
    W = F @ F.T
    return A, W


def bench_lyapunov(rng, sizes, repeats: int) -> None:
    print("prepped Lyapunov solve A X + X A^T + W = 0 "
          f"(median of {repeats})")
    print(f"{'n':>6} {'reference':>12} {'compiled':>12} {'speedup':>9} "
          f"{'max|diff|':>11}")
    for n in sizes:
        A, W = _stable_instance(rng, n)
        fact_ref, _ = _reference.prep_lyapunov(A)
        fact_cmp, _ = _compiled.prep_lyapunov(A)
        t_ref = _median_time(
            lambda: _reference.solve_lyapunov_prepped(fact_ref, W), repeats)
        t_cmp = _median_time(
            lambda: _compiled.solve_lyapunov_prepped(fact_cmp, W), repeats)
        X_ref = _reference.solve_lyapunov_prepped(fact_ref, W)
        X_cmp = _compiled.solve_lyapunov_prepped(fact_cmp, W)
        diff = np.abs(X_ref - X_cmp).max()
        print(f"{n:>6} {t_ref:>12.3e} {t_cmp:>12.3e} "
              f"{t_ref / t_cmp:>8.1f}x {diff:>11.1e}")


def bench_rk4(rng, sizes, repeats: int, steps: int = 2000) -> None:
    print(f"\nRK4 segment, {steps} steps, m = 2 (median of {repeats})")
    print(f"{'n':>6} {'reference':>12} {'compiled':>12} {'speedup':>9} "
          f"{'max|diff|':>11}")
    for n in sizes:
        A, _ = _stable_instance(rng, n)
        B = rng.standard_normal((n, 2))
        x0 = rng.standard_normal(n)
        u = rng.standard_normal((2 * steps + 1, 2))
        h = 1e-3
        t_ref = _median_time(
            lambda: _reference.rk4_segment(A, B, u, x0, h, steps), repeats)
        t_cmp = _median_time(
            lambda: _compiled.rk4_segment(A, B, u, x0, h, steps), repeats)
        x_ref = _reference.rk4_segment(A, B, u, x0, h, steps)
        x_cmp = _compiled.rk4_segment(A, B, u, x0, h, steps)
        diff = np.abs(x_ref - x_cmp).max()
        print(f"{n:>6} {t_ref:>12.3e} {t_cmp:>12.3e} "
              f"{t_ref / t_cmp:>8.1f}x {diff:>11.1e}")


def bench_end_to_end(n: int) -> None:
    print(f"\nend-to-end generalized Gramian, tridiagonal family n = {n}")
    code = (
        "import time\n"
        "from swibal.families import example2\n"
        "from swibal.gramians import reach_gramian\n"
        "from swibal._kernels import active_backend_name\n"
        f"model = example2({n})\n"
        "t0 = time.perf_counter()\n"
        "reach_gramian(model)\n"
        "print(active_backend_name, time.perf_counter() - t0)\n"
    )
    results = {}
    for backend in ("reference", "compiled"):
        env = dict(os.environ, SWIBAL_KERNELS=backend)
        proc = subprocess.run([sys.executable, "-c", code], env=env,
                              capture_output=True, text=True, check=True)
        name, elapsed = proc.stdout.split()
        assert name == backend
        results[backend] = float(elapsed)
        print(f"  {backend:>10}: {results[backend]:.3f} s")
    print(f"  speedup: {results['reference'] / results['compiled']:.1f}x")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[20, 50, 100, 200])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--end-to-end-n", type=int, default=200)
    args = parser.parse_args(argv)

    if _compiled is None:
        print("compiled extension not importable; nothing to compare "
              "(build it with pip install -e . --no-build-isolation)")
        return 1
    print(f"backends: reference={_reference.name!r}, "
          f"compiled={_compiled.name!r}")
    rng = np.random.default_rng(0)
    bench_lyapunov(rng, args.sizes, args.repeats)
    bench_rk4(rng, [s for s in args.sizes if s <= 200], args.repeats)
    bench_end_to_end(args.end_to_end_n)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
