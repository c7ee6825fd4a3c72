"""Verification suites shared by ``verify-all`` and the acceptance tests.

Each check returns a :class:`CheckResult` whose ``detail`` holds the
measured quantities, so failures can be diagnosed from the report alone.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import angular, classifier, extension, fracops, specfun, witness
from .angular import Constant, Fourier, SpectralConfig


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        info = ", ".join(f"{k}={_fmt(v)}" for k, v in self.detail.items())
        return f"[{flag}] {self.name} ({self.seconds:.1f}s): {info}"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def _timed(name: str, fn: Callable[[], tuple[bool, dict]]) -> CheckResult:
    t0 = time.perf_counter()
    passed, detail = fn()
    return CheckResult(name, bool(passed), detail, time.perf_counter() - t0)


ORACLE_CASES = ((3, 0.5), (3, 0.75), (2, 0.4), (4, 0.3))
ORACLE_FRACTIONS = (0.1, 0.25, 0.5, 0.75)


def closed_form_oracle(cfg: SpectralConfig | None = None) -> CheckResult:
    """Numeric mu_1(lambda(alpha)) against alpha^2 - ((N-2s)/2)^2, each solve < 2 s."""
    def run():
        worst, slowest = 0.0, 0.0
        for N, s in ORACLE_CASES:
            half = (N - 2.0 * s) / 2.0
            for frac in ORACLE_FRACTIONS:
                alpha = frac * half
                a = angular.lambda_of_alpha(N, s, alpha)
                t0 = time.perf_counter()
                mu = angular.mu1_constant(N, s, a, cfg).mu1
                slowest = max(slowest, time.perf_counter() - t0)
                worst = max(worst, abs(mu - (alpha * alpha - half * half)))
        return worst <= 1e-6 and slowest < 2.0, {"max_error": worst, "max_solve_s": slowest}
    return _timed("closed-form oracle", run)


def reference_constants() -> CheckResult:
    """lambda(1/2) = (N-2)/2 for N = 3..6 and kappa_{1/2} = 1."""
    def run():
        errs = [abs(angular.critical_coupling(N, 0.5) - (N - 2) / 2.0) for N in range(3, 7)]
        errs += [abs(angular.lambda_of_alpha(N, 0.5, 0.5) - (N - 2) / 2.0) for N in range(3, 7)]
        kap = abs(specfun.kappa_s(0.5) - 1.0)
        return max(errs) <= 1e-12 and kap <= 4 * np.finfo(float).eps, {"max_lambda_error": max(errs),
                                                                       "kappa_error": kap}
    return _timed("reference constants", run)


SHARPNESS_CASES = ((3, 0.5), (3, 0.7), (4, 0.4))


def threshold_sharpness(cfg: SpectralConfig | None = None) -> CheckResult:
    """classify is ESA at const:lambda(s) and not at const:lambda(s) + 1e-4."""
    def run():
        flips = {}
        for N, s in SHARPNESS_CASES:
            lam = angular.critical_coupling(N, s)
            at = classifier.classify(N, s, 1.0, Constant(lam), cfg)
            above = classifier.classify(N, s, 1.0, Constant(lam + 1e-4), cfg)
            flips[f"{N},{s}"] = at.esa is True and above.esa is False
        return all(flips.values()), {k: v for k, v in flips.items()}
    return _timed("threshold sharpness", run)


MASS_T = (0.1, 0.5, 1.0, 2.0)
MASS_M = (0.5, 1.0, 2.0)


def kernel_mass_identity(s: float = 0.5) -> CheckResult:
    """int P_m(t, x) dx = theta(mt) on the 4 x 3 grid, under 5 s."""
    def run():
        worst = max(abs(extension.kernel_mass(s, m, t).value - specfun.theta_profile(s, m * t))
                    for t in MASS_T for m in MASS_M)
        return worst <= 1e-8, {"s": s, "max_error": worst}
    res = _timed("kernel mass identity", run)
    res.passed = res.passed and res.seconds < 5.0
    return res


def _radii(count: int = 10, seed: int = 7) -> np.ndarray:
    return np.sort(np.random.default_rng(seed).uniform(0.1, 3.0, count))


def representation_equivalence() -> CheckResult:
    """Fourier multiplier vs singular integral for (-Delta + 1)^s on a Gaussian."""
    def run():
        g = fracops.gaussian()
        r = _radii()
        worst = 0.0
        for s in (0.4, 0.6):
            fourier = fracops.frac_power_radial(s, 1.0, g, r).value
            direct = np.array([fracops.relativistic_singular_integral(s, 1.0, g, [x, 0.0, 0.0]).value
                               for x in r])
            worst = max(worst, float(np.max(np.abs(fourier - direct) / np.abs(fourier))))
        return worst <= 1e-4, {"max_rel_diff": worst}
    return _timed("representation equivalence", run)


WITNESS_B = (0.5, 1.0, 4.0)


def witness_suite(cfg: SpectralConfig | None = None) -> CheckResult:
    """ODE residual, weak identity with negative control, L^2 status and tail rate."""
    def run():
        N, s = 3, 0.5
        a = angular.lambda_of_alpha(N, s, 0.3)
        phi = fracops.annular_bump(0.5, 2.0)
        report = classifier.classify(N, s, 1.0, Constant(a), cfg)
        res = angular.mu1_constant(N, s, a, cfg)
        detail = {}
        ok = True
        for b in WITNESS_B:
            w = witness.build_witness(N, s, b, Constant(a), mu1_result=res)
            r = np.geomspace(1e-3, 50.0, 40)
            ode = float(np.max(np.abs(witness.radial_ode_residual(w, r))))
            weak = witness.weak_identity_residual(w, phi)
            neg = witness.weak_identity_residual(w, phi, coupling=0.5 * a)
            l2 = witness.l2_membership(w)
            tail = witness.exponential_tail(w)
            tail_err = abs(tail / -math.sqrt(b) - 1.0)
            ok &= (ode <= 1e-8 and weak <= 1e-3 and neg >= 10.0 * weak and l2.in_l2
                   and l2.in_l2 == (not report.esa) and tail_err <= 0.02)
            detail[f"b={b}"] = f"ode={ode:.1e} weak={weak:.1e} neg={neg:.1e} in_l2={l2.in_l2} tail_err={tail_err:.1e}"
        detail["esa"] = report.esa
        return ok, detail
    return _timed("witness suite", run)


def exponent_identities(count: int = 100, seed: int = 11) -> CheckResult:
    """gamma + alpha = -(N-2s) and gamma alpha = -mu_1 on random admissible inputs."""
    def run():
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(count):
            N = int(rng.integers(1, 7))
            s = float(rng.uniform(specfun.S_MIN, min(specfun.S_MAX, N / 2.0 - 0.01)))
            half = (N - 2.0 * s) / 2.0
            mu = float(rng.uniform(-half * half, 4.0))
            g, a = classifier.decay_exponents(N, s, mu)
            worst = max(worst, abs(g + a + (N - 2.0 * s)), abs(g * a + mu))
        return worst <= 1e-10, {"max_error": worst}
    return _timed("exponent identities", run)


def fourier_solver(cfg: SpectralConfig | None = None) -> CheckResult:
    """Single-mode consistency and monotone response to lowering the coupling."""
    def run():
        s, c = 0.4, 0.3
        single = angular.mu1_fourier(s, Fourier({0: c}), cfg).mu1
        const = angular.mu1_constant(2, s, c, cfg).mu1
        base = Fourier.from_pairs({0: c, 1: 0.05})
        mu0 = angular.mu1_fourier(s, base, cfg).mu1
        sig = (0.1, 0.2, 0.4)
        mus = [angular.mu1_fourier(s, base.shifted(-x), cfg).mu1 for x in sig]
        quot = [(m - mu0) / x for m, x in zip(mus, sig)]
        increasing = mu0 < mus[0] < mus[1] < mus[2]
        bracket = min(quot) > 0.0 and max(quot) / min(quot) < 2.0
        ok = abs(single - const) <= 1e-8 and increasing and bracket
        return ok, {"single_mode_diff": abs(single - const), "quotients": [round(q, 6) for q in quot]}
    return _timed("fourier solver", run)


def tail_decay() -> CheckResult:
    """Tail exponent of |(-Delta)^s bump| on [5, 50] is -(N+2s) within 5%."""
    def run():
        bump = fracops.ball_bump(1.0, 8)
        r = np.geomspace(5.0, 50.0, 12)
        detail, ok = {}, True
        for s in (0.4, 0.6):
            vals = fracops.frac_power_radial(s, 0.0, bump, r).value
            slope = fracops.fit_decay_exponent(zip(r, vals))
            rel = abs(slope / -(3.0 + 2.0 * s) - 1.0)
            ok &= rel <= 0.05
            detail[f"s={s}"] = f"slope={slope:.4f}"
        return ok, detail
    return _timed("tail decay", run)


def kelvin_isometry() -> CheckResult:
    """Kelvin transform preserves the H^s seminorm and is an involution."""
    def run():
        N, s = 3, 0.5
        g = fracops.gaussian()
        n0 = fracops.homogeneous_norm(g, s)
        n1 = fracops.homogeneous_norm(fracops.kelvin_transform(g, N, s), s)
        r = np.geomspace(1e-2, 1e2, 25)
        worst = 0.0
        for p in (-2.5, -0.7, 0.0, 1.3):
            v = fracops.RadialFunction(lambda x, p=p: np.asarray(x) ** p, "power", exponent=p, tail_coeff=1.0)
            back = fracops.kelvin_transform(fracops.kelvin_transform(v, N, s), N, s)
            worst = max(worst, float(np.max(np.abs(back(r) / v(r) - 1.0))))
        rel = abs(n1 / n0 - 1.0)
        return rel <= 1e-3 and worst <= 1e-14, {"norm_rel_diff": rel, "involution_error": worst}
    return _timed("kelvin isometry", run)


ALL_CHECKS = (closed_form_oracle, reference_constants, threshold_sharpness, kernel_mass_identity,
              representation_equivalence, witness_suite, exponent_identities, fourier_solver,
              tail_decay, kelvin_isometry)


def run_all() -> list[CheckResult]:
    return [check() for check in ALL_CHECKS]
