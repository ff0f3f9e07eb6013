"""Kernel backend selection.

Hot loops ship in two flavours: a numba ``@njit`` kernel and a vectorised
numpy fallback.  The fallback is used when numba is missing or when
``PRIMEDELTA_PURE_NUMPY=1`` is set in the environment.  ``set_backend`` flips
the choice at runtime (benchmarks and the cross-backend tests use it).
"""

from __future__ import annotations

import os

try:
    import numba
    from numba.extending import register_jitable

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

PURE_NUMPY_ENV = "PRIMEDELTA_PURE_NUMPY"
THREADS_ENV = "PRIMEDELTA_THREADS"

_TRUTHY = {"1", "true", "yes", "on"}

_state = {
    "numba": HAVE_NUMBA
    and os.environ.get(PURE_NUMPY_ENV, "").strip().lower() not in _TRUTHY
}


def using_numba() -> bool:
    return _state["numba"]


def set_backend(name: str) -> None:
    """Select ``"numba"`` or ``"numpy"`` for every dispatched kernel."""
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _state["numba"] = name == "numba"


def backend_name() -> str:
    return "numba" if _state["numba"] else "numpy"


def jitable(fn):
    """Plain Python callable that numba kernels may also call.

    Functions written with arithmetic and ``np`` ufuncs only work on scalars
    inside jitted code and on whole arrays from Python, which is how the
    double-double routines are shared between both backends.
    """
    if HAVE_NUMBA:
        return register_jitable(fn)
    return fn


def njit(fn):
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


class Kernel:
    """A pair of implementations dispatched on the active backend."""

    __slots__ = ("name", "numba", "numpy")

    def __init__(self, name, numba_impl, numpy_impl):
        self.name = name
        self.numba = numba_impl
        self.numpy = numpy_impl

    def __call__(self, *args):
        if _state["numba"]:
            return self.numba(*args)
        return self.numpy(*args)

    def __repr__(self):
        return f"Kernel({self.name!r}, active={backend_name()})"


def resolve_threads(requested: int | None = None) -> int:
    """Worker count: environment override, then the flag, then all cores."""
    env = os.environ.get(THREADS_ENV, "").strip()
    if env:
        value = int(env)
    elif requested is not None:
        value = int(requested)
    else:
        value = os.cpu_count() or 1
    if value < 1:
        raise ValueError("thread count must be >= 1")
    return value
