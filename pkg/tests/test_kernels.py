import os
import subprocess
import sys

import numpy as np
import pytest
from scipy import signal
from scipy.special import xlogy

from repi import kernels

BACKENDS = ["python"]
try:
    kernels.backend_module("cython")
    BACKENDS.append("cython")
except ImportError:
    pass


@pytest.fixture(params=BACKENDS)
def mod(request):
    return kernels.backend_module(request.param)


def test_direct_convolve_1d(mod, rng):
    a, b = rng.random(37), rng.random(20)
    np.testing.assert_allclose(mod.direct_convolve_1d(a, b), np.convolve(a, b), rtol=1e-13, atol=1e-13)


def test_direct_convolve_2d(mod, rng):
    a, b = rng.random((9, 13)), rng.random((7, 4))
    np.testing.assert_allclose(mod.direct_convolve_2d(a, b), signal.convolve2d(a, b), rtol=1e-13, atol=1e-13)


def test_power_sum_skips_zeros(mod, rng):
    v = rng.random(1000)
    v[::7] = 0.0
    w = rng.random(1000)
    assert mod.power_sum(v, w, 0.5) == pytest.approx(float(np.sum(w * v**0.5)), rel=1e-12)
    assert mod.power_sum(v, w, 2.5) == pytest.approx(float(np.sum(w * v**2.5)), rel=1e-12)


def test_xlogx_sum(mod, rng):
    v = rng.random(1000)
    v[::5] = 0.0
    w = rng.random(1000)
    assert mod.xlogx_sum(v, w) == pytest.approx(float(np.sum(w * xlogy(v, v))), rel=1e-12)


def test_dispatch_shapes(rng):
    with pytest.raises(ValueError):
        kernels.direct_convolve(rng.random(4), rng.random((2, 2)))
    with pytest.raises(ValueError):
        kernels.direct_convolve(rng.random((2, 2, 2)), rng.random((2, 2, 2)))


def test_env_forces_fallback():
    env = dict(os.environ, REPI_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from repi.kernels import BACKEND; print(BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
