"""Kernel backend selection.

The membership dynamic program has two interchangeable implementations: a
numba ``@njit`` kernel (default) and a batched pure-numpy fallback.  The
``LLCONJ_BACKEND`` environment variable selects one explicitly (``numba`` or
``numpy``); unset or ``auto`` picks numba when it imports cleanly.  Call sites
may also pass ``backend=`` directly, which wins over the environment.
"""

from __future__ import annotations

import os

import numpy as np

from .encode import EncodedGrammar, kernel_args

ENV_VAR = "LLCONJ_BACKEND"

_UNSET = object()
_numba_module = _UNSET


def _numba_kernels():
    global _numba_module
    if _numba_module is _UNSET:
        try:
            from . import kernel_numba as mod
        except Exception:  # pragma: no cover - exercised only without numba
            mod = None
        _numba_module = mod
    return _numba_module


def active_backend(backend: str | None = None) -> str:
    choice = backend or os.environ.get(ENV_VAR, "") or "auto"
    if choice == "auto":
        return "numba" if _numba_kernels() is not None else "numpy"
    if choice == "numba":
        if _numba_kernels() is None:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return "numba"
    if choice == "numpy":
        return "numpy"
    raise ValueError(f"unknown backend {choice!r} (expected 'numba', 'numpy' or 'auto')")


def _module(backend: str | None):
    if active_backend(backend) == "numba":
        return _numba_kernels()
    from . import kernel_numpy

    return kernel_numpy


def membership_array(enc: EncodedGrammar, w: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Boolean table ``M[A, i, j]`` for one encoded string."""
    return _module(backend).membership_table(w, len(enc.nt_names), *kernel_args(enc))


def recognize_batch(enc: EncodedGrammar, W: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Membership of the start symbol for a batch of equal-length strings."""
    if W.ndim != 2:
        raise ValueError("expected a 2-d batch of encoded strings")
    return _module(backend).recognize_batch(W, enc.start, len(enc.nt_names), *kernel_args(enc))
