import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_hardy import angular, specfun
from spectral_hardy.angular import Constant, Fourier, SpectralConfig
from spectral_hardy.errors import ParameterRangeError

from oracles import lambda_mp, shooting_mu1

ORACLE_GRID = [(N, s, f) for N, s in ((3, 0.5), (3, 0.75), (2, 0.4), (4, 0.3))
               for f in (0.1, 0.25, 0.5, 0.75)]


class TestConstantSolver:
    def test_zero_coupling(self):
        res = angular.mu1_constant(3, 0.5, 0.0)
        assert abs(res.mu1) < 1e-13
        assert res.converged

    @pytest.mark.parametrize("N,s,frac", ORACLE_GRID)
    def test_closed_form_oracle(self, N, s, frac):
        half = (N - 2 * s) / 2
        alpha = frac * half
        a = float(lambda_mp(N, s, alpha))
        assert angular.mu1_constant(N, s, a).mu1 == pytest.approx(alpha ** 2 - half ** 2, abs=1e-8)

    def test_example_value(self):
        a = angular.lambda_of_alpha(3, 0.5, 0.3)
        assert angular.mu1_constant(3, 0.5, a).mu1 == pytest.approx(-0.91, abs=1e-9)

    def test_sign_convention_of_shooting_oracle(self):
        a = angular.lambda_of_alpha(3, 0.5, 0.3)
        assert shooting_mu1(3, a, -0.999, -0.5) == pytest.approx(-0.91, abs=1e-9)

    def test_repulsive_coupling_against_shooting(self):
        expected = shooting_mu1(3, -1.0, 1e-6, 3.0)
        res = angular.mu1_constant(3, 0.5, -1.0)
        assert expected > 0
        assert res.mu1 == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("N", [4, 5])
    def test_repulsive_higher_dimension_against_shooting(self, N):
        expected = shooting_mu1(N, -0.7, 1e-6, 4.0)
        assert angular.mu1_constant(N, 0.5, -0.7).mu1 == pytest.approx(expected, abs=1e-9)

    def test_galerkin_upper_bounds_decrease(self):
        mus = [angular.mu1_constant(3, 0.3, 0.8, SpectralConfig(basis_size=k)).mu1 for k in (4, 8, 16, 32)]
        assert all(b <= a + 1e-13 for a, b in zip(mus, mus[1:]))

    def test_est_error_tracks_true_error(self):
        half = (4 - 0.6) / 2
        a = angular.lambda_of_alpha(4, 0.3, 0.5 * half)
        res = angular.mu1_constant(4, 0.3, a, SpectralConfig(basis_size=6))
        err = abs(res.mu1 - ((0.5 * half) ** 2 - half ** 2))
        assert err <= 2 * res.est_error + 1e-14

    @given(st.floats(-3.0, 3.0), st.floats(0.01, 2.0))
    @settings(max_examples=15)
    def test_decreasing_in_coupling(self, a, gap):
        lo = angular.mu1_constant(3, 0.6, a).mu1
        hi = angular.mu1_constant(3, 0.6, a + gap).mu1
        assert hi < lo

    @given(st.floats(-2.0, 2.0), st.floats(0.05, 1.0))
    @settings(max_examples=10)
    def test_concave_in_coupling(self, a, h):
        m = [angular.mu1_constant(2, 0.4, a + d).mu1 for d in (-h, 0.0, h)]
        assert m[1] >= 0.5 * (m[0] + m[2]) - 1e-10

    @pytest.mark.parametrize("a", [-5.0, -0.5, -1e-3])
    def test_repulsive_is_positive(self, a):
        assert angular.mu1_constant(3, 0.4, a).mu1 > 0

    def test_eigenfunction_normalized_and_positive(self):
        res = angular.mu1_constant(3, 0.4, 0.7)
        u = np.linspace(0.0, 1.0, 201)
        psi = res.eigenfunction(u)
        assert res.trace > 0 and np.all(psi > 0)
        assert psi[0] == pytest.approx(res.trace, rel=1e-10)

    @pytest.mark.parametrize("s,a", [(0.3, 0.9), (0.5, -1.0), (0.7, 0.4)])
    def test_equator_flux_condition(self, s, a):
        res = angular.mu1_constant(3, s, a)
        expected = -specfun.kappa_s(s) * a * res.trace
        assert res.equator_flux() == pytest.approx(expected, rel=1e-3)

    def test_dimension_one(self):
        a = angular.lambda_of_alpha(1, 0.2, 0.15)
        half = 0.3
        assert angular.mu1_constant(1, 0.2, a).mu1 == pytest.approx(0.15 ** 2 - half ** 2, abs=1e-8)

    @pytest.mark.parametrize("N,s", [(1, 0.6), (0, 0.3), (3, 0.99)])
    def test_range(self, N, s):
        with pytest.raises(ParameterRangeError):
            angular.mu1_constant(N, s, 0.1)


class TestGammaMap:
    def test_three_dimensional_half(self):
        assert angular.lambda_of_alpha(3, 0.5, 0.5) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("N", [3, 4, 5, 6])
    def test_half_order(self, N):
        assert angular.lambda_of_alpha(N, 0.5, 0.5) == pytest.approx((N - 2) / 2, abs=1e-12)
        assert angular.critical_coupling(N, 0.5) == pytest.approx((N - 2) / 2, abs=1e-12)

    @given(st.integers(1, 8), st.floats(0.05, 0.95), st.floats(0.01, 0.99))
    @settings(max_examples=40)
    def test_against_mpmath(self, N, s, frac):
        if N <= 2 * s:
            return
        alpha = frac * (N - 2 * s) / 2
        assert angular.lambda_of_alpha(N, s, alpha) == pytest.approx(float(lambda_mp(N, s, alpha)), rel=1e-12)

    def test_decreasing(self):
        al = np.linspace(0.01, 0.99, 50) * 1.2
        lam = [angular.lambda_of_alpha(4, 0.8, a) for a in al]
        assert np.all(np.diff(lam) < 0)

    def test_vanishes_at_right_end(self):
        assert angular.lambda_of_alpha(3, 0.5, 1.0 - 1e-9) < 1e-8

    def test_inverse_examples(self):
        assert angular.alpha_of_lambda(3, 0.5, 0.5) == pytest.approx(0.5, abs=1e-12)

    @given(st.integers(2, 6), st.floats(0.05, 0.95), st.floats(0.02, 0.98))
    @settings(max_examples=40)
    def test_round_trip(self, N, s, frac):
        if N <= 2 * s:
            return
        alpha = frac * (N - 2 * s) / 2
        lam = angular.lambda_of_alpha(N, s, alpha)
        assert angular.alpha_of_lambda(N, s, lam) == pytest.approx(alpha, abs=1e-9)

    def test_inverse_against_bisection(self):
        N, s, lam = 4, 0.3, 0.2
        lo, hi = mp.mpf(0), mp.mpf(N - 2 * s) / 2
        for _ in range(80):
            mid = (lo + hi) / 2
            lo, hi = (mid, hi) if lambda_mp(N, s, mid) > lam else (lo, mid)
        assert angular.alpha_of_lambda(N, s, lam) == pytest.approx(float(lo), abs=1e-12)

    def test_critical_examples(self):
        assert angular.critical_coupling(3, 0.5) == pytest.approx(0.5, abs=1e-12)
        assert angular.critical_coupling(5, 0.5) == pytest.approx(1.5, abs=1e-12)

    def test_critical_needs_n_above_4s(self):
        with pytest.raises(ParameterRangeError):
            angular.critical_coupling(1, 0.3)

    def test_critical_is_lambda_at_s(self):
        assert angular.critical_coupling(4, 0.7) == pytest.approx(angular.lambda_of_alpha(4, 0.7, 0.7), rel=1e-13)

    def test_closed_form_branches(self):
        top = angular.hardy_constant(3, 0.5)
        assert angular.mu1_closed_form(3, 0.5, 0.0) == 0.0
        assert angular.mu1_closed_form(3, 0.5, top * 1.01) is None
        assert angular.mu1_closed_form(3, 0.5, -0.2) is None
        assert angular.mu1_closed_form(3, 0.5, 0.5) == pytest.approx(0.25 - 1.0, abs=1e-12)

    def test_hardy_constant_is_sup(self):
        top = angular.hardy_constant(3, 0.5)
        assert angular.lambda_of_alpha(3, 0.5, 1e-6) == pytest.approx(top, rel=1e-10)
        # at the supremum positivity is exactly lost
        assert angular.mu1_constant(3, 0.5, top).mu1 == pytest.approx(-1.0, abs=1e-6)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1])
    def test_alpha_range(self, alpha):
        with pytest.raises(ParameterRangeError):
            angular.lambda_of_alpha(3, 0.5, alpha)


class TestFourier:
    def test_single_mode_matches_constant(self):
        c = 0.37
        f = angular.mu1_fourier(0.45, Fourier({0: c})).mu1
        assert f == pytest.approx(angular.mu1_constant(2, 0.45, c).mu1, abs=1e-8)

    def test_continuity_in_first_harmonic(self):
        base = angular.mu1_fourier(0.4, Fourier({0: 0.3})).mu1
        diffs = []
        for eps in (0.04, 0.02, 0.01):
            mu = angular.mu1_fourier(0.4, Fourier.from_pairs({0: 0.3, 1: eps})).mu1
            diffs.append(abs(mu - base) / eps)
        assert max(diffs) < 1.0
        assert diffs[0] >= diffs[1] >= diffs[2]

    def test_pointwise_domination(self):
        c, d, s = 0.3, 0.1, 0.4
        mid = angular.mu1_fourier(s, Fourier.from_pairs({0: c, 1: d / 2})).mu1
        upper = angular.mu1_constant(2, s, c - d).mu1
        lower = angular.mu1_constant(2, s, c + d).mu1
        assert lower < mid < upper

    def test_rotation_invariance(self):
        s, tau0 = 0.4, 0.9
        coeffs = {0: 0.3, 1: 0.05, 2: 0.02j}
        rotated = {k: v * np.exp(-1j * k * tau0) for k, v in coeffs.items()}
        a = angular.mu1_fourier(s, Fourier.from_pairs(coeffs)).mu1
        b = angular.mu1_fourier(s, Fourier.from_pairs(rotated)).mu1
        assert a == pytest.approx(b, abs=1e-10)

    def test_coupling_evaluation(self):
        f = Fourier.from_pairs({0: 0.3, 1: 0.05 + 0.02j})
        tau = np.linspace(0, 2 * np.pi, 9)
        expected = 0.3 + 2 * (0.05 * np.cos(tau) - 0.02 * np.sin(tau))
        np.testing.assert_allclose(f(tau), expected, atol=1e-15)

    def test_needs_dimension_two(self):
        with pytest.raises(ParameterRangeError):
            angular.mu1(3, 0.5, Fourier({0: 0.1}))

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError):
            Fourier({1: 0.1, -1: 0.2})

    def test_load_file(self, tmp_path):
        path = tmp_path / "a.txt"
        path.write_text("# k re im\n0 0.3 0\n1 0.05 0.02\n\n")
        f = angular.load_fourier_coupling(path)
        assert f.coeffs[-1] == pytest.approx(0.05 - 0.02j)
        assert f.max_order == 1

    @pytest.mark.parametrize("text", ["0 0.3 0\n0 0.1 0\n", "0 0.3 0.1\n", "1 0.2\n"])
    def test_load_rejects_bad_files(self, tmp_path, text):
        path = tmp_path / "bad.txt"
        path.write_text(text)
        with pytest.raises(ValueError):
            angular.load_fourier_coupling(path)


def test_config_validation():
    with pytest.raises(ValueError):
        SpectralConfig(basis_size=2)
    with pytest.raises(ValueError):
        SpectralConfig(basis_size=16, quad_points=10)
    with pytest.raises(ValueError):
        SpectralConfig(tolerance=0.0)


def test_solve_time_budget():
    import time
    t0 = time.perf_counter()
    angular.mu1_constant(4, 0.3, 0.4)
    assert time.perf_counter() - t0 < 2.0
