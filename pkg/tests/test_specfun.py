import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from spectral_hardy import specfun
from spectral_hardy.errors import DomainError, ParameterRangeError, PoleError


def stirling_gamma(x, shift=30, terms=50):
    """Gamma by upward recurrence then the Stirling series with Bernoulli terms."""
    x = mp.mpf(x)
    z = x + shift
    log_g = (z - mp.mpf(1) / 2) * mp.log(z) - z + mp.log(2 * mp.pi) / 2
    for k in range(1, terms + 1):
        log_g += mp.bernoulli(2 * k) / (2 * k * (2 * k - 1) * z ** (2 * k - 1))
    prod = mp.mpf(1)
    for j in range(shift):
        prod *= x + j
    return mp.exp(log_g) / prod


def k_quadrature(nu, r):
    val, _ = integrate.quad(lambda t: math.exp(-r * math.cosh(t)) * math.cosh(nu * t), 0, 10.0,
                            epsabs=0, epsrel=1e-13, limit=200)
    return val


def i_series(nu, r, terms=60):
    half = mp.mpf(r) / 2
    return sum(half ** (2 * k + nu) / (mp.factorial(k) * mp.gamma(k + nu + 1)) for k in range(terms))


class TestGamma:
    def test_factorial(self):
        assert specfun.gamma(5.0) == pytest.approx(24.0, rel=1e-14)

    def test_half(self):
        assert specfun.gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    @pytest.mark.parametrize("x", [1.25, 0.07, 3.3, 17.9, 60.5])
    def test_against_stirling_oracle(self, x):
        assert specfun.gamma(x) == pytest.approx(float(stirling_gamma(x)), rel=1e-13)

    @pytest.mark.parametrize("x", [-0.5, -1.3, -4.75])
    def test_reflection(self, x):
        assert specfun.gamma(x) == pytest.approx(float(mp.gamma(x)), rel=1e-13)

    def test_vectorized(self):
        x = np.array([0.3, 1.0, 2.5])
        np.testing.assert_allclose(specfun.gamma(x), [float(mp.gamma(v)) for v in x], rtol=1e-13)

    @pytest.mark.parametrize("x", [0.0, -1.0, -7.0])
    def test_poles(self, x):
        with pytest.raises(PoleError):
            specfun.gamma(x)

    def test_lgamma_large(self):
        assert specfun.lgamma(250.0) == pytest.approx(float(mp.loggamma(250)), rel=1e-14)

    def test_overflow(self):
        with pytest.raises(OverflowError):
            specfun.gamma(200.0)


class TestBesselK:
    def test_half_order_closed_form(self):
        assert specfun.bessel_k(0.5, 1.0) == pytest.approx(math.sqrt(math.pi / 2) * math.exp(-1), rel=1e-14)

    def test_quadrature_oracle(self):
        assert specfun.bessel_k(2.3, 7.0) == pytest.approx(k_quadrature(2.3, 7.0), rel=1e-12)

    @pytest.mark.parametrize("nu,r", [(0.0, 1e-6), (0.1, 0.01), (1.7, 0.5), (4.5, 3.0), (12.0, 40.0),
                                      (49.0, 2.0), (0.3, 99.0)])
    def test_against_mpmath(self, nu, r):
        assert specfun.bessel_k(nu, r) == pytest.approx(float(mp.besselk(nu, r)), rel=1e-12)

    @pytest.mark.parametrize("nu", [0.4, 0.7, 1.5, 3.0])
    def test_small_r_asymptote(self, nu):
        r = 1e-4
        lead = math.gamma(nu) / 2 * (r / 2) ** (-nu)
        assert abs(specfun.bessel_k(nu, r) / lead - 1) <= 1e-3

    def test_small_r_low_order_two_terms(self):
        # at nu = 0.1 the second term Gamma(-nu)/2 (r/2)^nu is 15% of the first,
        # in the exact function as well
        nu, r = 0.1, 1e-4
        lead = math.gamma(nu) / 2 * (r / 2) ** (-nu)
        assert abs(float(mp.besselk(nu, r)) / lead - 1) > 0.1
        two = lead + math.gamma(-nu) / 2 * (r / 2) ** nu
        assert specfun.bessel_k(nu, r) == pytest.approx(two, rel=1e-6)

    @pytest.mark.parametrize("nu", [0.0, 0.5, 1.0])
    def test_large_r_asymptote(self, nu):
        r = 50.0
        lead = math.sqrt(math.pi / 2) * r ** -0.5 * math.exp(-r)
        assert abs(specfun.bessel_k(nu, r) / lead - 1) <= 1e-2

    @pytest.mark.parametrize("nu", [2.0, 5.0])
    def test_large_r_first_correction(self, nu):
        r = 50.0
        lead = math.sqrt(math.pi / 2) * r ** -0.5 * math.exp(-r)
        mu = 4 * nu * nu
        series, term = 1.0, 1.0
        for k in range(1, 7):
            term *= (mu - (2 * k - 1) ** 2) / (k * 8 * r)
            series += term
        assert specfun.bessel_k(nu, r) / lead == pytest.approx(series, rel=1e-4)

    @given(st.floats(0.0, 50.0), st.floats(1e-3, 100.0))
    def test_even_in_order(self, nu, r):
        assert specfun.bessel_k(-nu, r) == specfun.bessel_k(nu, r)

    def test_array_shape(self):
        r = np.linspace(0.5, 2.0, 6).reshape(2, 3)
        assert specfun.bessel_k(1.0, r).shape == (2, 3)

    def test_log_matches_underflow_region(self):
        assert specfun.log_bessel_k(0.5, 100.0) == pytest.approx(float(mp.log(mp.besselk(0.5, 100))), rel=1e-13)

    @pytest.mark.parametrize("nu,r,err", [(51.0, 1.0, ParameterRangeError), (1.0, 1e-7, ParameterRangeError),
                                          (1.0, 101.0, ParameterRangeError), (1.0, 0.0, DomainError),
                                          (1.0, -2.0, DomainError)])
    def test_range_errors(self, nu, r, err):
        with pytest.raises(err):
            specfun.bessel_k(nu, r)


class TestBesselI:
    def test_half_order_closed_form(self):
        assert specfun.bessel_i(0.5, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(1.0), rel=1e-14)

    def test_series_oracle(self):
        assert specfun.bessel_i(1.7, 3.0) == pytest.approx(float(i_series(1.7, 3.0)), rel=1e-13)

    @pytest.mark.parametrize("nu,r", [(0.0, 0.2), (0.3, 5.0), (2.2, 25.0), (7.5, 60.0), (30.0, 95.0)])
    def test_against_mpmath(self, nu, r):
        assert specfun.bessel_i(nu, r) == pytest.approx(float(mp.besseli(nu, r)), rel=1e-12)

    @pytest.mark.parametrize("nu", [0.2, 1.0, 3.5])
    def test_small_r_leading_term(self, nu):
        r = 1e-5
        assert specfun.bessel_i(nu, r) * math.gamma(nu + 1) * (r / 2) ** (-nu) == pytest.approx(1.0, abs=1e-8)

    def test_negative_order(self):
        assert specfun.bessel_i(-0.3, 2.0) == pytest.approx(float(mp.besseli(-0.3, 2)), rel=1e-12)

    @given(st.floats(0.0, 20.0), st.floats(0.01, 30.0))
    def test_wronskian(self, nu, r):
        w = (specfun.bessel_i(nu, r) * specfun.bessel_k_derivative(nu, r)
             - specfun.bessel_i_derivative(nu, r) * specfun.bessel_k(nu, r))
        assert w * r == pytest.approx(-1.0, rel=1e-10)


class TestDerivatives:
    def test_k_half_symmetry_example(self):
        expected = -0.25 * specfun.bessel_k(0.5, 2.0) - specfun.bessel_k(0.5, 2.0)
        assert specfun.bessel_k_derivative(0.5, 2.0) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("nu,r", [(0.3, 0.7), (1.0, 2.0), (2.5, 10.0)])
    def test_k_finite_difference(self, nu, r):
        h = 1e-5 * r
        fd = (specfun.bessel_k(nu, r + h) - specfun.bessel_k(nu, r - h)) / (2 * h)
        assert specfun.bessel_k_derivative(nu, r) == pytest.approx(fd, rel=1e-8)

    @pytest.mark.parametrize("nu,r", [(0.3, 0.7), (1.0, 2.0), (2.5, 10.0)])
    def test_i_finite_difference(self, nu, r):
        h = 1e-5 * r
        fd = (specfun.bessel_i(nu, r + h) - specfun.bessel_i(nu, r - h)) / (2 * h)
        assert specfun.bessel_i_derivative(nu, r) == pytest.approx(fd, rel=1e-8)

    def test_k_exponential_slope(self):
        ratio = specfun.bessel_k_derivative(1.0, 10.0) / specfun.bessel_k(1.0, 10.0)
        # K'/K = -1 - 1/(2r) + O(r^-2)
        assert ratio == pytest.approx(-1.0 - 0.05, abs=5e-3)


class TestTheta:
    @pytest.mark.parametrize("s", [0.05, 0.3, 0.95])
    def test_at_zero(self, s):
        assert specfun.theta_profile(s, 0.0) == 1.0

    def test_half_is_exponential(self):
        r = np.array([0.0, 1e-8, 0.1, 0.5, 1.0, 7.0, 40.0])
        np.testing.assert_allclose(specfun.theta_profile(0.5, r), np.exp(-r), rtol=1e-13)

    @pytest.mark.parametrize("s,r", [(0.2, 0.3), (0.7, 0.6), (0.4, 5.0)])
    def test_against_bessel_form(self, s, r):
        exact = 2 / mp.gamma(s) * (mp.mpf(r) / 2) ** s * mp.besselk(s, r)
        assert specfun.theta_profile(s, r) == pytest.approx(float(exact), rel=1e-13)

    def test_ode_residual(self):
        s, r, h = 0.3, 2.0, 1e-3
        th = lambda x: specfun.theta_profile(s, x)
        d2 = (th(r + h) - 2 * th(r) + th(r - h)) / h ** 2
        d1 = (th(r + h) - th(r - h)) / (2 * h)
        assert abs(d2 + (1 - 2 * s) / r * d1 - th(r)) < 1e-6

    @pytest.mark.parametrize("s", [0.15, 0.5, 0.85])
    def test_derivative_fd(self, s):
        r, h = 1.3, 1e-5
        fd = (specfun.theta_profile(s, r + h) - specfun.theta_profile(s, r - h)) / (2 * h)
        assert specfun.theta_derivative(s, r) == pytest.approx(fd, rel=1e-8)

    @given(st.floats(0.05, 0.95))
    @settings(max_examples=25)
    def test_monotone_and_bounded(self, s):
        r = np.linspace(0.0, 60.0, 400)
        th = specfun.theta_profile(s, r)
        assert np.all(th > 0) and np.all(th <= 1.0)
        assert np.all(np.diff(th) < 0)

    def test_range(self):
        with pytest.raises(ParameterRangeError):
            specfun.theta_profile(0.5, 150.0)
        with pytest.raises(DomainError):
            specfun.theta_profile(0.5, -1.0)


class TestKappa:
    def test_half(self):
        assert specfun.kappa_s(0.5) == 1.0

    def test_quarter(self):
        exact = mp.gamma(0.75) / (mp.mpf(2) ** -0.5 * mp.gamma(0.25))
        assert specfun.kappa_s(0.25) == pytest.approx(float(exact), rel=1e-14)
        assert specfun.kappa_s(0.25) == pytest.approx(specfun.gamma(0.75) / (2 ** -0.5 * specfun.gamma(0.25)),
                                                      rel=1e-15)

    @pytest.mark.parametrize("s", [0.0, 0.04, 0.96, 1.0])
    def test_outside_box(self, s):
        with pytest.raises(ParameterRangeError):
            specfun.kappa_s(s)


@given(st.floats(0.0, 1e6), st.floats(0.0, 1e6), st.floats(1e-6, 1 - 1e-6))
@settings(max_examples=10_000)
def test_subadditive_power(a, b, s):
    gap = (a + b) ** s - a ** s
    tol = 1e-12 * max(1.0, (a + b) ** s)
    assert -tol <= gap <= b ** s + tol
