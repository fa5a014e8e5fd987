"""Backend selection for the hot loops.

The compiled Cython module is used when it imports; otherwise the numpy
fallback is used. Set ``REPI_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from repi import _pykernels

try:
    if os.environ.get("REPI_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-python backend requested")
    from repi import _ckernels as _impl
    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

__all__ = ["BACKEND", "direct_convolve", "power_sum", "xlogx_sum", "backend_module"]


def backend_module(name=None):
    """Return the kernel module for ``name`` ("cython", "python") or the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        from repi import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def direct_convolve(a, b):
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    if a.ndim != b.ndim:
        raise ValueError("arrays must have the same dimension")
    if a.ndim == 1:
        return _impl.direct_convolve_1d(a, b)
    if a.ndim == 2:
        return _impl.direct_convolve_2d(a, b)
    raise ValueError("only 1-D and 2-D arrays are supported")


def power_sum(values, weights, p):
    v = np.ascontiguousarray(values, dtype=float).ravel()
    w = np.ascontiguousarray(weights, dtype=float).ravel()
    return float(_impl.power_sum(v, w, float(p)))


def xlogx_sum(values, weights):
    v = np.ascontiguousarray(values, dtype=float).ravel()
    w = np.ascontiguousarray(weights, dtype=float).ravel()
    return float(_impl.xlogx_sum(v, w))
