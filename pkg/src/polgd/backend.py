"""Kernel backend selection.

The factorization hot loop exists twice: a numba-compiled kernel (default)
and a pure-numpy fallback with identical semantics. Selection order:

1. an explicit :func:`set_backend` call,
2. the ``POLGD_BACKEND`` environment variable (``numba`` or ``numpy``),
3. numba if it imports, numpy otherwise.

Both kernels expose ``factorize_block`` with the same argument layout; see
:mod:`polgd.kernels_numpy` for the reference implementation.
"""

from __future__ import annotations

import logging
import os
import warnings

log = logging.getLogger(__name__)

_ENV_VAR = "POLGD_BACKEND"
_VALID = ("numba", "numpy")
_forced: str | None = None
_modules: dict[str, object] = {}


def _load(name: str):
    if name not in _modules:
        if name == "numpy":
            from . import kernels_numpy as mod
        else:
            from . import kernels_numba as mod
        _modules[name] = mod
    return _modules[name]


def available_backends() -> tuple[str, ...]:
    out = ["numpy"]
    try:
        _load("numba")
        out.insert(0, "numba")
    except ImportError:
        pass
    return tuple(out)


def set_backend(name: str | None) -> None:
    """Force a backend for this process; None returns to automatic selection."""
    if name is not None:
        if name not in _VALID:
            raise ValueError(f"unknown backend {name!r}, expected one of {_VALID}")
        _load(name)
    global _forced
    _forced = name


def backend_name() -> str:
    """Name of the backend that :func:`get_backend` will return."""
    if _forced is not None:
        return _forced
    env = os.environ.get(_ENV_VAR, "").strip().lower()
    if env:
        if env not in _VALID:
            raise ValueError(
                f"{_ENV_VAR} must be one of {_VALID}, got {env!r}"
            )
        return env
    try:
        _load("numba")
        return "numba"
    except ImportError:
        warnings.warn("numba unavailable, falling back to the numpy kernel")
        return "numpy"


def get_backend():
    """Module providing ``factorize_block`` for the selected backend."""
    name = backend_name()
    mod = _load(name)
    log.debug("using %s kernel backend", name)
    return mod
