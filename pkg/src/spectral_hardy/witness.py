"""The explicit witness of non-essential self-adjointness.

With nu_1 = sqrt(((N-2s)/2)^2 + mu_1(a)) and b > 0,

    f(z) = psi_1(z/|z|) |z|^{(2s-N)/2} K_{nu_1}(sqrt(b) |z|),   z = (t, x),

solves -div(t^{1-2s} grad f) + b t^{1-2s} f = 0 in the half-space with the
angular boundary condition, so its trace satisfies
(-Delta + b)^s f = a |x|^{-2s} f away from the origin.  The trace is in
L^2(R^N) exactly when nu_1 < s.  The companion g uses I_{nu_1} in place of
K_{nu_1} and is regular at the origin.

Separating variables, the radial factor R(rho) satisfies

    R'' + (N+1-2s)/rho R' - (mu_1/rho^2 + b) R = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np
from scipy import integrate

from . import angular, specfun
from .angular import Constant, CouplingDescriptor, Mu1Result, SpectralConfig
from .errors import DomainError, ParameterRangeError
from .fracops import RadialFunction, _graded_rule, _panel_rule, apply_radial_multiplier, fit_exponential_rate

# the Bessel box bounds the radii at which the profiles can be evaluated
ODE_R_RANGE = (1e-3, 50.0)


@dataclass(frozen=True)
class Witness:
    """Witness function data; see the module docstring."""

    N: int
    s: float
    b: float
    mu1: float
    nu1: float
    psi1: Mu1Result
    coupling: CouplingDescriptor

    @property
    def trace_value(self) -> float:
        """psi_1 on the equator (theta_1 = 0)."""
        return self.psi1.trace

    @property
    def half_gap(self) -> float:
        return (self.N - 2.0 * self.s) / 2.0

    def radial_k(self, rho):
        """rho^{(2s-N)/2} K_{nu_1}(sqrt(b) rho)."""
        rho = np.asarray(rho, dtype=float)
        x = np.atleast_1d(math.sqrt(self.b) * rho).ravel()
        if np.any(x > specfun.R_MAX) or np.any(x <= 0.0):
            raise ParameterRangeError("sqrt(b) r must lie in (0, 100]")
        # the integral representation stays accurate below the box floor, which
        # the truncated L^2 integrals reach for b < 1
        lk = specfun._log_bessel_k(self.nu1, x).reshape(rho.shape)
        out = np.exp(-self.half_gap * np.log(rho) + lk)
        return out.item() if out.ndim == 0 else out

    def radial_i(self, rho):
        """rho^{(2s-N)/2} I_{nu_1}(sqrt(b) rho)."""
        rho = np.asarray(rho, dtype=float)
        return rho ** (-self.half_gap) * specfun.bessel_i(self.nu1, math.sqrt(self.b) * rho)

    def trace(self, r, tau: float = 0.0):
        """f(0, x) at |x| = r (and equator angle tau when N = 2)."""
        scale = float(np.real(self.psi1.eigenfunction(0.0, tau))) if self.psi1.modes != (0,) else self.trace_value
        return scale * self.radial_k(r)

    def field(self, t, r, tau: float = 0.0):
        """f(t, x) with |x| = r."""
        t = np.asarray(t, dtype=float)
        big_z = np.sqrt(t * t + np.asarray(r, dtype=float) ** 2)
        theta1 = t / big_z
        psi = np.real(self.psi1.eigenfunction(theta1, tau))
        return psi * self.radial_k(big_z)

    def companion_g(self, t, r, tau: float = 0.0):
        t = np.asarray(t, dtype=float)
        big_z = np.sqrt(t * t + np.asarray(r, dtype=float) ** 2)
        psi = np.real(self.psi1.eigenfunction(t / big_z, tau))
        return psi * self.radial_i(big_z)


def build_witness(N: int, s: float, b: float, coupling: CouplingDescriptor,
                  cfg: SpectralConfig | None = None, mu1_result: Mu1Result | None = None) -> Witness:
    """Assemble the witness from the angular eigenpair.

    Raises DomainError when mu_1 + ((N-2s)/2)^2 < 0, where nu_1 is not real.
    """
    N, s = angular._check_problem(N, s)
    if not b > 0.0:
        raise ParameterRangeError("b must be positive")
    res = mu1_result or angular.mu1(N, s, coupling, cfg)
    half = (N - 2.0 * s) / 2.0
    disc = half * half + res.mu1
    if disc < 0.0:
        raise DomainError("positivity fails: nu_1 would be imaginary")
    return Witness(N, s, float(b), res.mu1, math.sqrt(disc), res, coupling)


def _k_second(nu: float, x: np.ndarray):
    """K_nu, K_nu' and K_nu'' from the recurrence K_mu' = -(mu/x) K_mu - K_{mu-1}."""
    k0 = specfun.bessel_k(nu, x)
    k1 = specfun.bessel_k(nu - 1.0, x)
    k2 = specfun.bessel_k(nu - 2.0, x)
    d0 = -(nu / x) * k0 - k1
    d1 = -((nu - 1.0) / x) * k1 - k2
    dd0 = (nu / (x * x)) * k0 - (nu / x) * d0 - d1
    return k0, d0, dd0


def _i_second(nu: float, x: np.ndarray):
    """I_nu, I_nu' and I_nu'' from I_mu' = I_{mu+1} + (mu/x) I_mu."""
    i0 = specfun.bessel_i(nu, x)
    i1 = specfun.bessel_i(nu + 1.0, x)
    i2 = specfun.bessel_i(nu + 2.0, x)
    d0 = i1 + (nu / x) * i0
    d1 = i2 + ((nu + 1.0) / x) * i1
    dd0 = d1 - (nu / (x * x)) * i0 + (nu / x) * d0
    return i0, d0, dd0


def _ode_residual(w: Witness, r, which: str):
    r = np.asarray(r, dtype=float)
    lo, hi = ODE_R_RANGE
    if np.any(r < lo) or np.any(r > hi):
        raise ParameterRangeError(f"r must lie in [{lo}, {hi}]")
    sb = math.sqrt(w.b)
    x = sb * r
    z, dz, ddz = (_k_second if which == "k" else _i_second)(w.nu1, x)
    p = w.half_gap
    # R = r^{-p} Z(sqrt(b) r)
    rp = r ** (-p)
    big_r = rp * z
    d_r = rp * (sb * dz - p * z / r)
    dd_r = rp * w.b * ddz - 2.0 * p * rp * sb * dz / r + p * (p + 1.0) * rp * z / (r * r)
    coef = (w.N + 1.0 - 2.0 * w.s) / r
    pot = w.mu1 / (r * r) + w.b
    terms = np.stack([np.abs(dd_r), np.abs(coef * d_r), np.abs(pot * big_r)])
    res = (dd_r + coef * d_r - pot * big_r) / terms.max(axis=0)
    return res.item() if res.ndim == 0 else res


def radial_ode_residual(w: Witness, r) -> float:
    """Relative residual of the separated radial ODE for the K profile.

    The residual is divided by the largest of the three terms.
    """
    return _ode_residual(w, r, "k")


def companion_ode_residual(w: Witness, r) -> float:
    """Same residual for the I profile of the companion g."""
    return _ode_residual(w, r, "i")


@dataclass(frozen=True)
class L2Report:
    """L^2 status of the trace near the origin.

    ``near_origin_exponent`` is e in |f(0,x)|^2 |x|^{N-1} ~ |x|^e; the trace
    is square integrable exactly when e > -1.  ``truncated`` lists
    (eps, int_eps^1 |f|^2 dx) and ``confirmed`` says whether their growth
    agrees with the exponent.  Unpacks as (in_l2, near_origin_exponent).
    """

    in_l2: bool
    near_origin_exponent: float
    boundary: bool
    truncated: tuple
    confirmed: bool

    def __iter__(self):
        return iter((self.in_l2, self.near_origin_exponent))


EPS_LADDER = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


def truncated_l2(w: Witness, eps: float) -> float:
    """|S^{N-1}| int_eps^1 |f(0, r)|^2 r^{N-1} dr, integrated in log r."""
    area = 2.0 * math.pi ** (w.N / 2.0) / specfun.gamma(w.N / 2.0)
    c = w.trace_value

    def f(y):
        r = math.exp(y)
        return (c * float(w.radial_k(r))) ** 2 * r ** w.N
    val, *_ = integrate.quad(f, math.log(eps), 0.0, limit=200, epsabs=0.0, epsrel=1e-12, full_output=1)
    return area * val


def l2_membership(w: Witness, eps_ladder=EPS_LADDER) -> L2Report:
    """Classify the trace as L^2 or not near the origin.

    The exponent 2s - 2 nu_1 - 1 follows from K_nu(x) ~ (Gamma(nu)/2)(x/2)^{-nu}.
    Truncated integrals over [eps, 1] confirm it: their increments shrink
    by 10^{2 nu_1 - 2s} per decade, so they settle when nu_1 < s and grow
    otherwise (linearly in log(1/eps) at the boundary nu_1 = s).
    """
    expo = 2.0 * w.s - 2.0 * w.nu1 - 1.0
    boundary = abs(w.nu1 - w.s) <= 1e-12
    in_l2 = w.nu1 < w.s and not boundary
    vals = [truncated_l2(w, e) for e in eps_ladder]
    incs = np.diff(vals)
    ratios = incs[1:] / incs[:-1]
    expected = 10.0 ** (2.0 * w.nu1 - 2.0 * w.s)
    if boundary:
        confirmed = bool(np.all(np.abs(ratios - 1.0) < 0.05))
    elif in_l2:
        confirmed = bool(np.all(ratios < 1.0) and abs(ratios[-1] / expected - 1.0) < 0.05)
    else:
        confirmed = bool(np.all(ratios > 1.0) and abs(ratios[-1] / expected - 1.0) < 0.05)
    return L2Report(in_l2, expo, boundary, tuple(zip(eps_ladder, vals)), confirmed)


def _fit_slope(r: np.ndarray, y: np.ndarray, corrections) -> float:
    """Coefficient of log r in a fit of log y on [1, log r, r^c for c in corrections]."""
    cols = [np.ones_like(r), np.log(r)] + [r ** c for c in corrections]
    coef, *_ = np.linalg.lstsq(np.column_stack(cols), np.log(np.abs(y)), rcond=None)
    return float(coef[1])


def _corrections(nu: float, kind: str):
    # K_nu carries relative corrections r^{2 nu}, r^2, ...; I_nu only r^2, r^4
    out = [2.0, 4.0] if kind == "i" else [2.0]
    if kind == "k" and 0.02 < 2.0 * nu:
        out = [c for c in (2.0 * nu, 4.0 * nu, 2.0) if all(abs(c - d) > 0.02 for d in out)] + out
        out = sorted(set(out))
    return out


def near_origin_exponents(w: Witness, window=(1e-4, 1e-2), samples: int = 41,
                          corrected: bool = True) -> tuple[float, float]:
    """Fitted power rates (f_exp, g_exp) of the traces of f and g near 0.

    The formulas are f_exp = -(N-2s)/2 - nu_1 and g_exp = -(N-2s)/2 + nu_1.
    With ``corrected`` the log-log fit includes the known subleading powers
    of the Bessel expansions, which removes the bias of a plain slope
    (about 0.02 on the default window for nu_1 = 0.3).
    """
    lo, hi = window
    if not (0.0 < lo < hi and hi >= 10.0 * lo):
        raise DomainError("window must span at least one decade")
    r = np.geomspace(lo, hi, samples)
    f = w.radial_k(r)
    g = w.radial_i(r)
    cf = _corrections(w.nu1, "k") if corrected else []
    cg = _corrections(w.nu1, "i") if corrected else []
    return _fit_slope(r, f, cf), _fit_slope(r, g, cg)


def exponential_tail(w: Witness, window=(10.0, 40.0), samples: int = 31) -> float:
    """Fitted exponential rate of the trace: log f = c + beta log r - kappa r; returns -kappa."""
    r = np.linspace(*window, samples)
    kappa, _ = fit_exponential_rate(list(zip(r, w.trace(r))))
    return -kappa


def _weak_grid(w: Witness, r1: float, r2: float):
    """Radial nodes/weights covering (0, R] for the pairing integral."""
    reach = 45.0 / math.sqrt(w.b) + r2
    # stop the dyadic grading at the Bessel box; the omitted piece is O(r^{3-(N-2s)/2-nu_1})
    levels = int(math.log2(r1 * math.sqrt(w.b) / (2.0 * specfun.R_MIN)))
    q0, w0 = _graded_rule(r1, 1.0, levels)
    q1, w1 = _panel_rule(r1, r2, (r2 - r1) / 32.0)
    q2, w2 = _panel_rule(r2, reach, 1.0)
    return np.concatenate([q0, q1, q2]), np.concatenate([w0, w1, w2])


def weak_identity_residual(w: Witness, phi: RadialFunction, coupling: float | None = None) -> float:
    """Relative residual of int f(0,x) [(-Delta+b)^s phi - a |x|^{-2s} phi] dx.

    ``phi`` must be compactly supported away from 0.  The pairing is
    divided by int |f| (|(-Delta+b)^s phi| + |a| |x|^{-2s} |phi|) dx, so a
    value near 1 means no cancellation at all.  ``coupling`` overrides a
    (the negative control).
    """
    if w.N != 3:
        raise ParameterRangeError("the weak identity check is implemented for N = 3")
    if not isinstance(w.coupling, Constant):
        raise ParameterRangeError("the weak identity check needs a constant coupling")
    if phi.decay != "compact" or phi.inner <= 0.0:
        raise ParameterRangeError("phi must be compactly supported away from the origin")
    a = w.coupling.value if coupling is None else float(coupling)
    r, wt = _weak_grid(w, phi.inner, phi.scale)
    if not np.any(phi(r)):
        return 0.0
    # the pairing only needs a few digits beyond the 1e-3 target
    lphi = apply_radial_multiplier(phi, lambda k: (k * k + w.b) ** w.s, r, growth=2.0 * w.s,
                                   rel_tol=1e-10, estimate_error=False).value
    pot = a * r ** (-2.0 * w.s) * phi(r)
    f = w.trace(r)
    jac = 4.0 * math.pi * r * r * wt
    pairing = float(np.sum(jac * f * (lphi - pot)))
    scale = float(np.sum(jac * np.abs(f) * (np.abs(lphi) + np.abs(pot))))
    return abs(pairing) / scale
