"""Selects the jet-kernel implementation at import time.

Preference order: the compiled Cython extension if it was built, else the
numpy fallback.  ``QEFLAT_JET_BACKEND`` overrides: ``compiled``, ``python``
or ``auto`` (default).  Benchmarks and equivalence tests can also reach
both implementations explicitly through :func:`make_mul_for`.
"""

from __future__ import annotations

import os

import numpy as np

from . import _jetkernel_py

try:
    from . import _jetkernel as _compiled
except ImportError:  # extension not built; numpy fallback remains
    _compiled = None


def _compiled_make_mul(ii: np.ndarray, jj: np.ndarray, kk: np.ndarray, size: int):
    ii = np.ascontiguousarray(ii, dtype=np.intc)
    jj = np.ascontiguousarray(jj, dtype=np.intc)
    kk = np.ascontiguousarray(kk, dtype=np.intc)

    def mul_batch(a, b, out):
        _compiled.mul_batch(a, b, out, ii, jj, kk)

    return mul_batch


def available_backends() -> tuple[str, ...]:
    return ("compiled", "python") if _compiled is not None else ("python",)


def make_mul_for(name: str, ii, jj, kk, size):
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled jet kernel is not available")
        return _compiled_make_mul(ii, jj, kk, size)
    if name == "python":
        return _jetkernel_py.make_mul(ii, jj, kk, size)
    raise ValueError(f"unknown backend {name!r}")


def _select() -> str:
    choice = os.environ.get("QEFLAT_JET_BACKEND", "auto").lower()
    if choice == "auto":
        return "compiled" if _compiled is not None else "python"
    if choice not in ("compiled", "python"):
        raise RuntimeError(f"QEFLAT_JET_BACKEND must be auto, compiled or python, not {choice!r}")
    if choice == "compiled" and _compiled is None:
        raise RuntimeError("QEFLAT_JET_BACKEND=compiled but the extension is not built")
    return choice


ACTIVE_BACKEND = _select()


def backend_name() -> str:
    """Name of the kernel implementation selected at import."""
    return ACTIVE_BACKEND


def make_mul(ii, jj, kk, size):
    return make_mul_for(ACTIVE_BACKEND, ii, jj, kk, size)
