import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from repi.convolution import common_spacing, convolve, weighted_combine
from repi.densities import (
    FiniteMixture,
    Gaussian,
    GridSpec,
    Laplace,
    Uniform,
    discretize,
    discretize_pair,
    family_from_spec,
    mean_and_covariance,
)
from repi.errors import DensityError


def test_gaussian_sum_is_gaussian():
    f, g = discretize_pair(Gaussian(0, 1), Gaussian(0, 2), n=4096)
    z = convolve(f, g)
    exact = Gaussian(0, 3).pdf(z.spec.points())
    assert np.max(np.abs(z.values - exact)) < 1e-6
    assert z.ringing < 1e-12


def test_uniform_sum_is_triangle():
    f = discretize(Uniform(0, 1), n=1025)
    z = convolve(f, f)
    x = z.spec.points()
    triangle = np.clip(1 - np.abs(x - 1), 0, None)
    # jumps in the inputs cost O(h) at the ends and at the peak
    h = f.spec.spacing[0]
    assert np.max(np.abs(z.values - triangle)) <= h
    assert z.sup() == pytest.approx(1.0, abs=h)
    assert z.argmax_point()[0] == pytest.approx(1.0, abs=1e-12)


def test_near_delta_is_identity():
    f = discretize(Laplace(1.0), n=8192)
    h = f.spec.spacing[0]
    delta = discretize(Gaussian(0, 1e-6), GridSpec((-10 * h,), (h,), (21,)))
    z = convolve(f, delta)
    assert np.max(np.abs(z.interpolate(f.spec.points()) - f.values)) < 1e-6


def test_spacing_mismatch_rejected():
    with pytest.raises(DensityError):
        convolve(discretize(Gaussian(0, 1), n=1024), discretize(Gaussian(0, 1), n=1000))


def test_output_lattice():
    f = discretize(Uniform(0, 1), GridSpec((0.0,), (0.01,), (101,)))
    g = discretize(Uniform(2, 3), GridSpec((2.0,), (0.01,), (101,)))
    z = convolve(f, g)
    assert z.spec.count == (201,)
    assert z.spec.origin == pytest.approx((2.0,))


families = st.sampled_from([
    {"family": "gaussian", "sigma": 1.0},
    {"family": "gaussian", "sigma": 0.4, "mean": 1.0},
    {"family": "uniform", "low": -1.0, "high": 0.5},
    {"family": "laplace", "scale": 0.7},
    {"family": "exponential", "rate": 2.0},
])


@given(families, families, st.integers(64, 512))
def test_fft_matches_direct(a, b, n):
    f, g = discretize_pair(family_from_spec(a), family_from_spec(b), n=n)
    zf, zd = convolve(f, g), convolve(f, g, method="direct")
    assert np.max(np.abs(zf.values - zd.values)) < 1e-8


@given(families, families)
def test_commutative_and_mass_preserving(a, b):
    f, g = discretize_pair(family_from_spec(a), family_from_spec(b), n=512)
    zfg, zgf = convolve(f, g), convolve(g, f)
    assert zfg.spec == zgf.spec
    assert np.max(np.abs(zfg.values - zgf.values)) <= 1e-15 * zfg.sup()
    np.testing.assert_array_equal(convolve(f, g, method="direct").values, convolve(f, g, method="direct").values)
    assert zfg.mass() == pytest.approx(1.0, abs=1e-6)


@given(families, families)
def test_variance_additivity(a, b):
    fa, fb = family_from_spec(a), family_from_spec(b)
    f, g = discretize_pair(fa, fb, n=8192)
    _, cov = mean_and_covariance(convolve(f, g))
    assert cov[0, 0] == pytest.approx(fa.covariance()[0, 0] + fb.covariance()[0, 0], abs=1e-5)


@given(families, families, st.floats(0.05, 0.95))
def test_weighted_variance(a, b, t):
    fa, fb = family_from_spec(a), family_from_spec(b)
    z = weighted_combine(discretize(fa, n=8192), discretize(fb, n=8192), t)
    _, cov = mean_and_covariance(z)
    expected = t * fa.covariance()[0, 0] + (1 - t) * fb.covariance()[0, 0]
    assert cov[0, 0] == pytest.approx(expected, abs=1e-5)
    assert z.mass() == pytest.approx(1.0, abs=1e-6)


def test_two_dimensional_convolution():
    f = discretize(Gaussian([0.0, 0.0], [[1.0, 0.2], [0.2, 0.5]]), GridSpec.centered((0.0, 0.0), (8.0, 8.0), 128))
    g = discretize(Gaussian([1.0, 0.0], 0.5), GridSpec.centered((0.0, 0.0), (8.0, 8.0), 128))
    z = convolve(f, g)
    m, c = mean_and_covariance(z)
    np.testing.assert_allclose(m, [1.0, 0.0], atol=1e-6)
    np.testing.assert_allclose(c, [[1.5, 0.2], [0.2, 1.0]], atol=1e-5)
    small_f = discretize(Gaussian([0.0, 0.0], 1.0), GridSpec.centered((0.0, 0.0), (6.0, 6.0), 40))
    zd = convolve(small_f, small_f, method="direct")
    assert np.max(np.abs(convolve(small_f, small_f).values - zd.values)) < 1e-12


def test_weighted_identity_check():
    f, g = discretize(Gaussian(0, 1), n=512), discretize(Uniform(0, 1), n=512)
    assert weighted_combine(f, g, 1.0, identity_check=True) is f
    assert weighted_combine(f, g, 0.0, identity_check=True) is g
    with pytest.raises(ValueError):
        weighted_combine(f, g, 1.0)


@pytest.mark.parametrize("t", [0.3, 0.5, 0.7])
def test_weighted_iid_gaussians_stay_standard(t):
    f = discretize(Gaussian(0, 1), n=4096)
    z = weighted_combine(f, f, t)
    assert np.max(np.abs(z.values - Gaussian(0, 1).pdf(z.spec.points()))) < 1e-6


def test_weighted_uniform_pair_half():
    f = discretize(Uniform(0, 1), n=4097)
    z = weighted_combine(f, f, 0.5)
    x = z.spec.points()
    # (U1 + U2) / sqrt(2): triangle on [0, sqrt 2], peak sqrt 2 at 1/sqrt 2
    r2 = math.sqrt(2)
    triangle = r2 * np.clip(1 - np.abs(x * r2 - 1), 0, None)
    assert np.max(np.abs(z.values - triangle)) <= z.spec.spacing[0]
    assert z.sup() == pytest.approx(r2, abs=z.spec.spacing[0])


def test_common_spacing_picks_finer():
    f = discretize(Gaussian(0, 1), n=1000)
    g = discretize(FiniteMixture([Gaussian(-1, 1), Gaussian(1, 1)], [0.5, 0.5]), n=1000)
    h = common_spacing(f, g, 0.2)
    assert h[0] == pytest.approx(min(math.sqrt(0.2) * f.spec.spacing[0], math.sqrt(0.8) * g.spec.spacing[0]))
