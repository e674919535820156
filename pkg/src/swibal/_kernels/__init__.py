"""Kernel backend selection.

Two interchangeable backends provide the numerical hot paths: a compiled
Cython one and a pure NumPy reference one. The choice is made once at import
time from the SWIBAL_KERNELS environment variable:

- "auto" (default): compiled when the extension is importable, else reference
- "compiled": require the extension, fail loudly when missing
- "reference": force the pure NumPy path

Each backend module exposes the same surface: ``name``, ``prep_lyapunov``,
``solve_lyapunov_prepped`` and ``rk4_segment``.
"""

import os

from . import _reference


def _load(choice: str):
    if choice == "reference":
        return _reference
    if choice == "compiled":
        from . import _compiled
        return _compiled
    if choice == "auto":
        try:
            from . import _compiled
            return _compiled
        except ImportError:
            return _reference
    raise ValueError(
        "SWIBAL_KERNELS must be one of 'auto', 'compiled', 'reference', "
        f"got {choice!r}"
    )


backend = _load(os.environ.get("SWIBAL_KERNELS", "auto").strip().lower())

active_backend_name = backend.name
prep_lyapunov = backend.prep_lyapunov
solve_lyapunov_prepped = backend.solve_lyapunov_prepped
rk4_segment = backend.rk4_segment

__all__ = [
    "active_backend_name",
    "backend",
    "prep_lyapunov",
    "rk4_segment",
    "solve_lyapunov_prepped",
]
