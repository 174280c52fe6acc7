"""Hot-loop kernels with two interchangeable backends.

``PARGI_BACKEND=numba`` (default when numba imports) selects the compiled
kernels; ``PARGI_BACKEND=numpy`` selects the vectorized fallback.  Both
produce identical arrays, so canonical color ids never depend on the backend.

All kernels build *signature rows*: one int64 row per refined object whose
lexicographic order is the canonical order of the signatures.
"""

from __future__ import annotations

import contextlib
import os
from types import ModuleType

from . import _numpy

try:
    from . import _numba
except ImportError:  # pragma: no cover - numba is a hard dependency
    _numba = None

BACKENDS = ("numba", "numpy")


def _from_env() -> str:
    name = os.environ.get("PARGI_BACKEND", "numba").strip().lower() or "numba"
    if name not in BACKENDS:
        raise ValueError(f"PARGI_BACKEND must be one of {BACKENDS}, got {name!r}")
    if name == "numba" and _numba is None:
        return "numpy"
    return name


_active = _from_env()


def backend_name() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and _numba is None:
        raise RuntimeError("numba is not importable")
    _active = name


@contextlib.contextmanager
def use_backend(name: str):
    prev = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


def get() -> ModuleType:
    return _numba if _active == "numba" else _numpy
