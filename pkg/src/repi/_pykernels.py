"""Numpy implementations of the kernels in ``_ckernels.pyx``."""

import numpy as np
from scipy import signal


def direct_convolve_1d(a, b):
    return np.convolve(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def direct_convolve_2d(a, b):
    return signal.convolve(np.asarray(a, dtype=float), np.asarray(b, dtype=float), method="direct")


def power_sum(values, weights, p):
    """Sum of ``weights * values**p``; zero values contribute nothing."""
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    mask = v > 0
    return float(np.sum(w[mask] * v[mask] ** p))


def xlogx_sum(values, weights):
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    mask = v > 0
    return float(np.sum(w[mask] * v[mask] * np.log(v[mask])))
