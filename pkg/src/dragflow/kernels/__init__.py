"""Kernel backend selection.

Two interchangeable stencil backends exist: a numba-jitted one (default) and
a pure-numpy fallback.  Selection order:

1. ``use_backend("numpy"|"numba")`` at runtime (tests, benchmarks);
2. the ``DRAGFLOW_BACKEND`` environment variable (``numba``, ``numpy`` or
   ``auto``);
3. ``auto``: numba when importable, numpy otherwise.

Both backends operate on arrays canonicalized to 3-d (trailing axes of
size 1), which the numpy backend also accepts natively.
"""

from __future__ import annotations

import os

from . import numpy_backend

_BACKENDS = {"numpy": numpy_backend}
_active = None


def _load_numba_backend():
    if "numba" not in _BACKENDS:
        from . import numba_backend  # deferred: jit machinery import is not free

        _BACKENDS["numba"] = numba_backend
    return _BACKENDS["numba"]


def available_backends() -> tuple[str, ...]:
    try:
        _load_numba_backend()
    except ImportError:
        pass
    return tuple(sorted(_BACKENDS))


def use_backend(name: str):
    """Select the kernel backend by name; returns the backend module."""
    global _active
    if name == "numpy":
        _active = numpy_backend
    elif name == "numba":
        _active = _load_numba_backend()
    else:
        raise ValueError(f"unknown backend {name!r} (expected 'numba' or 'numpy')")
    return _active


def get_backend():
    """The active backend module (resolving the environment flag once)."""
    global _active
    if _active is None:
        choice = os.environ.get("DRAGFLOW_BACKEND", "auto").strip().lower()
        if choice in ("numba", "numpy"):
            use_backend(choice)
        elif choice in ("auto", ""):
            try:
                use_backend("numba")
            except ImportError:
                use_backend("numpy")
        else:
            raise ValueError(
                f"DRAGFLOW_BACKEND={choice!r} not understood; use 'numba', 'numpy' or 'auto'"
            )
    return _active
