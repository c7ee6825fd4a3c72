import math

import numpy as np
import pytest
from scipy import integrate

from spectral_hardy import extension, fracops, specfun
from spectral_hardy.errors import DomainError, ParameterRangeError
from spectral_hardy.extension import ExtensionField

GAUSS = fracops.gaussian()


class TestKernel:
    @pytest.mark.parametrize("s", [0.3, 0.5, 0.8])
    def test_mass_identity(self, s):
        for t in (0.1, 0.5, 1.0, 2.0):
            for m in (0.5, 1.0, 2.0):
                res = extension.kernel_mass(s, m, t)
                assert abs(res.value - specfun.theta_profile(s, m * t)) <= 1e-8

    @pytest.mark.parametrize("s,m,t,k", [(0.5, 1.0, 0.5, 2.0), (0.3, 2.0, 0.2, 5.0), (0.7, 0.5, 1.0, 1.0)])
    def test_fourier_pair(self, s, m, t, k):
        f = lambda rho: 4 * math.pi * rho * extension.bessel_kernel(s, m, t, rho) / k
        val = 0.0
        for a, b in ((0.0, t), (t, 10 * t + 10 / m)):
            val += integrate.quad(f, a, b, weight="sin", wvar=k, limit=400, epsabs=1e-14)[0]
        val += integrate.quad(f, 10 * t + 10 / m, np.inf, weight="sin", wvar=k)[0]
        assert val == pytest.approx(specfun.theta_profile(s, t * math.hypot(k, m)), rel=1e-8)

    def test_vanishes_as_t_to_zero(self):
        vals = [extension.bessel_kernel(0.5, 1.0, t, 1.0) for t in (1e-2, 1e-4, 1e-6)]
        assert vals[2] < vals[1] < vals[0] and vals[2] < 1e-6
        assert vals[1] / vals[2] == pytest.approx(100.0 ** (2 * 0.5), rel=1e-3)

    def test_large_mass_rate(self):
        s, t, rho, m, h = 0.4, 0.3, 0.4, 50.0, 1e-3
        z = math.hypot(t, rho)
        nu = (3 + 2 * s) / 2
        slope = (math.log(extension.bessel_kernel(s, m + h, t, rho))
                 - math.log(extension.bessel_kernel(s, m - h, t, rho))) / (2 * h)
        # two terms of the large-argument expansion of log K_nu
        expected = -z + (nu - 0.5) / m - (4 * nu * nu - 1) / (8 * m * m * z)
        assert slope == pytest.approx(expected, abs=1e-4)

    def test_t_derivative(self):
        s, m, t, rho, h = 0.35, 1.5, 0.4, 0.7, 1e-5
        fd = (extension.bessel_kernel(s, m, t + h, rho) - extension.bessel_kernel(s, m, t - h, rho)) / (2 * h)
        assert extension.kernel_t_derivative(s, m, t, rho) == pytest.approx(fd, rel=1e-8)

    def test_positive(self):
        rho = np.linspace(0.0, 20.0, 50)
        assert np.all(extension.bessel_kernel(0.6, 1.0, 0.3, rho) > 0)

    @pytest.mark.parametrize("args,err", [((0.5, 0.0, 1.0, 1.0), ParameterRangeError),
                                          ((0.5, 1.0, 0.0, 1.0), DomainError),
                                          ((0.99, 1.0, 1.0, 1.0), ParameterRangeError)])
    def test_validation(self, args, err):
        with pytest.raises(err):
            extension.bessel_kernel(*args)


class TestExtend:
    @pytest.mark.parametrize("s,m,t", [(0.5, 1.0, 0.3), (0.3, 2.0, 0.1), (0.8, 0.5, 1.0)])
    def test_dual_route(self, s, m, t):
        r = np.array([0.2, 0.9, 2.5])
        a = extension.extend_radial(GAUSS, s, m, t, r, method="fourier").value
        b = extension.extend_radial(GAUSS, s, m, t, r, method="convolution").value
        np.testing.assert_allclose(a, b, rtol=1e-6)

    def test_dual_route_on_bump(self):
        u = fracops.ball_bump(1.5)
        a = extension.extend_radial(u, 0.6, 1.0, 0.2, 0.8, method="fourier").value
        b = extension.extend_radial(u, 0.6, 1.0, 0.2, 0.8, method="convolution").value
        assert a == pytest.approx(b, rel=1e-6)

    def test_trace_limit(self):
        r = np.array([0.3, 1.0, 1.8])
        w = extension.extend_radial(GAUSS, 0.9, 1.0, 1e-3, r).value
        np.testing.assert_allclose(w, GAUSS(r), atol=1e-4)

    @pytest.mark.parametrize("s", [0.5, 0.75])
    def test_trace_limit_leading_term(self, s):
        # theta(x) = 1 - Gamma(1-s)/Gamma(1+s) (x/2)^{2s} + ..., so
        # w - u ~ -Gamma(1-s)/Gamma(1+s) (t/2)^{2s} (-Delta + m^2)^s u
        t, r = 1e-4, np.array([0.3, 1.0, 1.8])
        w = extension.extend_radial(GAUSS, s, 1.0, t, r).value
        lead = -math.gamma(1 - s) / math.gamma(1 + s) * (t / 2) ** (2 * s)
        lead = lead * fracops.frac_power_radial(s, 1.0, GAUSS, r).value
        np.testing.assert_allclose(w - GAUSS(r), lead, rtol=2e-2)

    def test_trace_limit_rate(self):
        # the approximate identity converges like t^{2s}
        s, r = 0.5, np.array([0.5, 1.2])
        err = [np.abs(extension.extend_radial(GAUSS, s, 1.0, t, r).value - GAUSS(r)) for t in (2e-3, 1e-3)]
        np.testing.assert_allclose(err[0] / err[1], 2.0 ** (2 * s), rtol=0.02)

    def test_zero_trace(self):
        zero = fracops.gaussian(amplitude=0.0)
        assert np.all(extension.extend_radial(zero, 0.5, 1.0, 0.3, [0.5, 1.0]).value == 0.0)

    def test_nonnegative(self):
        u = fracops.annular_bump(0.5, 1.5)
        r = np.linspace(0.05, 4.0, 25)
        for t in (0.05, 0.5, 2.0):
            w = extension.extend_radial(u, 0.4, 1.0, t, r, method="convolution").value
            assert np.all(w >= -1e-14)

    def test_bad_method(self):
        with pytest.raises(ValueError):
            extension.extend_radial(GAUSS, 0.5, 1.0, 0.3, 1.0, method="spline")

    def test_fourier_needs_positive_radius(self):
        with pytest.raises(DomainError):
            extension.extend_radial(GAUSS, 0.5, 1.0, 0.3, 0.0)


class TestPde:
    def test_profile_residual(self):
        w = ExtensionField.profile(0.3, 1.5)
        assert abs(extension.extension_pde_residual(w, 0.8, 1.0, 1e-3)) < 1e-5

    def test_second_order_convergence(self):
        w = ExtensionField.from_trace(GAUSS, 0.6, 1.0)
        res = [abs(extension.extension_pde_residual(w, 0.5, 1.0, h)) for h in (0.08, 0.04, 0.02)]
        assert res[0] / res[1] == pytest.approx(4.0, rel=0.1)
        assert res[1] / res[2] == pytest.approx(4.0, rel=0.1)

    def test_step_constraint(self):
        with pytest.raises(DomainError):
            extension.extension_pde_residual(ExtensionField.profile(0.5, 1.0), 0.1, 1.0, 0.05)


class TestFlux:
    @pytest.mark.parametrize("s,m,r", [(0.5, 1.0, 1.0), (0.3, 2.0, 0.5), (0.7, 0.5, 1.5)])
    def test_flux_identity(self, s, m, r):
        lhs, rhs = extension.boundary_flux_check(GAUSS, s, m, r)
        assert abs(lhs - rhs) <= 1e-3 * max(1.0, abs(rhs))

    def test_zero(self):
        lhs, rhs = extension.boundary_flux_check(fracops.gaussian(amplitude=0.0), 0.5, 1.0, 1.0)
        assert lhs == 0.0 and rhs == 0.0

    def test_linear(self):
        a = extension.boundary_flux_check(GAUSS, 0.5, 1.0, 1.0)
        b = extension.boundary_flux_check(fracops.gaussian(amplitude=2.0), 0.5, 1.0, 1.0)
        np.testing.assert_allclose(b, 2 * np.asarray(a), rtol=1e-10)

    def test_richardson_exact(self):
        ts = np.array([0.1, 0.05, 0.025])
        vals = 3.0 + 2.0 * ts ** 0.8 - 5.0 * ts ** 2
        assert extension.richardson(ts, vals, (0.8, 2.0)) == pytest.approx(3.0, abs=1e-12)

    def test_needs_three_steps(self):
        with pytest.raises(ValueError):
            extension.boundary_flux_check(GAUSS, 0.5, 1.0, 1.0, steps=(1e-2, 5e-3))
