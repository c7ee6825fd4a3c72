"""Bessel-kernel extension of (-Delta + m^2)^s to the half-space.

For u on R^N, w(t, x) = (P_m(t, .) * u)(x) with

    P_m(t, z) = C t^{2s} m^nu |z|^{-nu} K_nu(m |z|),   |z|^2 = t^2 + |x|^2,
    nu = (N + 2s) / 2,

solves -div(t^{1-2s} grad w) + m^2 t^{1-2s} w = 0 and
-lim t^{1-2s} w_t = kappa_s (-Delta + m^2)^s u.  In Fourier variables P_m(t, .)
is the multiplier theta(t sqrt(|xi|^2 + m^2)), which fixes

    C = 2^{1-nu} pi^{-N/2} / Gamma(s)

and gives the mass identity int P_m(t, x) dx = theta(m t).  Radial
operations here are for N = 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from . import specfun
from .errors import DomainError, ParameterRangeError, QuadratureError
from .fracops import QuadResult, RadialFunction, _SphereMean, apply_radial_multiplier, frac_power_radial

N_RADIAL = 3


def kernel_constant(N: int, s: float) -> float:
    """C = 2^{1-(N+2s)/2} pi^{-N/2} / Gamma(s)."""
    return 2.0 ** (1.0 - (N + 2.0 * s) / 2.0) * math.pi ** (-N / 2.0) / specfun.gamma(s)


def _log_k(nu: float, z: np.ndarray) -> np.ndarray:
    """log K_nu(z) with -inf past the Bessel box, where K_nu < e^-100."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.full(z.shape, -np.inf)
    ok = z <= specfun.R_MAX
    if np.any(ok):
        out[ok] = specfun._log_bessel_k(abs(nu), z[ok])
    return out


def _zk(nu: float, m: float, big_z: np.ndarray, power: float) -> np.ndarray:
    """m^nu Z^{power} K_nu(m Z), evaluated in log space."""
    big_z = np.asarray(big_z, dtype=float)
    return np.exp(nu * math.log(m) + power * np.log(big_z) + _log_k(nu, m * big_z)).reshape(big_z.shape)


def bessel_kernel(s: float, m: float, t, rho, N: int = N_RADIAL):
    """P_m(t, x) for |x| = rho."""
    s = specfun.check_s(s)
    if not m > 0.0:
        raise ParameterRangeError("bessel_kernel needs m > 0")
    t = np.asarray(t, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if np.any(t <= 0.0) or np.any(rho < 0.0):
        raise DomainError("bessel_kernel needs t > 0 and rho >= 0")
    nu = (N + 2.0 * s) / 2.0
    big_z = np.sqrt(t * t + rho * rho)
    out = kernel_constant(N, s) * t ** (2.0 * s) * _zk(nu, m, big_z, -nu)
    return out.item() if out.ndim == 0 else out


def kernel_t_derivative(s: float, m: float, t, rho, N: int = N_RADIAL):
    """d/dt P_m(t, x), using d/dZ [Z^{-nu} K_nu(mZ)] = -m Z^{-nu} K_{nu+1}(mZ)."""
    nu = (N + 2.0 * s) / 2.0
    t = np.asarray(t, dtype=float)
    big_z = np.sqrt(t * t + np.asarray(rho, dtype=float) ** 2)
    c = kernel_constant(N, s)
    out = c * (2.0 * s * t ** (2.0 * s - 1.0) * _zk(nu, m, big_z, -nu)
               - t ** (2.0 * s + 1.0) * _zk(nu + 1.0, m, big_z, -nu - 1.0))
    return out.item() if out.ndim == 0 else out


def kernel_mass(s: float, m: float, t: float, N: int = N_RADIAL) -> QuadResult:
    """int_{R^N} P_m(t, x) dx by radial quadrature."""
    area = 2.0 * math.pi ** (N / 2.0) / specfun.gamma(N / 2.0)
    f = lambda rho: area * rho ** (N - 1) * bessel_kernel(s, m, t, rho, N)
    # the kernel lives on the scale max(t, 1/m) and decays like e^{-m rho}
    reach = max(t, 1.0 / m)
    pts = [0.0, reach, 4.0 * reach, 16.0 * reach]
    total = 0.0
    err = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        v, e = integrate.quad(f, a, b, limit=200, epsabs=0.0, epsrel=1e-13)
        total += v
        err += e
    v, e = integrate.quad(f, pts[-1], np.inf, limit=200, epsabs=1e-16, epsrel=1e-13)
    return QuadResult(total + v, err + e)


def _theta_clamped(s: float, r: np.ndarray) -> np.ndarray:
    """theta(r), with theta = 0 past the Bessel box (theta(100) ~ e^-100)."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    ok = r <= specfun.R_MAX
    out[ok] = specfun.theta_profile(s, r[ok])
    return out


def _theta_prime_clamped(s: float, r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    ok = (r <= specfun.R_MAX) & (r > 0.0)
    out[ok] = specfun.theta_derivative(s, r[ok])
    return out


# ---------------------------------------------------------------------------
# extension of radial data (N = 3)


def _check_extension(s: float, m: float, t: float):
    s = specfun.check_s(s)
    if not m > 0.0:
        raise ParameterRangeError("extension needs m > 0")
    if not t > 0.0:
        raise DomainError("extension needs t > 0")
    return s


def _shell_kernel(s: float, m: float, t: float, r: float, sigma: np.ndarray) -> np.ndarray:
    """Mean of P_m(t, x - y) over the sphere |y| = sigma, with |x| = r.

    Closed form from int P rho d rho = -C t^{2s} m^{nu-1} Z^{1-nu} K_{nu-1}(mZ).
    """
    nu = (N_RADIAL + 2.0 * s) / 2.0
    c = kernel_constant(N_RADIAL, s) * t ** (2.0 * s)

    def g(rho):
        return _zk(nu - 1.0, m, np.sqrt(t * t + rho * rho), 1.0 - nu)
    if r == 0.0:
        return bessel_kernel(s, m, t, sigma)
    return c * (g(np.abs(r - sigma)) - g(r + sigma)) / (2.0 * r * sigma)


def _extend_convolution(u: RadialFunction, s: float, m: float, t: float, r: float) -> QuadResult:
    if u.decay == "power":
        raise ParameterRangeError("convolution route needs a compact or exponential profile")
    lo, hi = u.inner, u.scale
    f = lambda sig: 4.0 * math.pi * sig * sig * float(u(sig)) * float(_shell_kernel(s, m, t, r, np.array([sig]))[0])
    # the shell kernel peaks within a few t of sigma = r
    pts = sorted({lo, hi, *[p for p in (r - 4.0 * t, r, r + 4.0 * t) if lo < p < hi]})
    total, err = 0.0, 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        v, e, *_ = integrate.quad(f, a, b, limit=400, epsabs=1e-15, epsrel=1e-12, full_output=1)
        total += v
        err += e
    return QuadResult(total, err)


def _extend_fourier(u: RadialFunction, s: float, m: float, t: float, r) -> QuadResult:
    mult = lambda k: _theta_clamped(s, t * np.sqrt(k * k + m * m))
    return apply_radial_multiplier(u, mult, r)


def extend_radial(u: RadialFunction, s: float, m: float, t: float, r, method: str = "fourier") -> QuadResult:
    """w(t, r) = (P_m(t, .) * u)(x) at |x| = r for radial u on R^3.

    ``method='convolution'`` integrates the closed-form shell average of the
    kernel against u; ``method='fourier'`` applies the multiplier
    theta(t sqrt(k^2 + m^2)) through sine transforms.
    """
    s = _check_extension(s, m, t)
    if method == "fourier":
        r = np.asarray(r, dtype=float)
        if np.any(r == 0.0):
            raise DomainError("fourier route needs r > 0")
        return _extend_fourier(u, s, m, t, r)
    if method == "convolution":
        if np.ndim(r):
            res = [_extend_convolution(u, s, m, t, float(x)) for x in np.ravel(r)]
            shape = np.shape(r)
            return QuadResult(np.array([v for v, _ in res]).reshape(shape),
                              np.array([e for _, e in res]).reshape(shape))
        return _extend_convolution(u, s, m, t, float(r))
    raise ValueError("method must be 'fourier' or 'convolution'")


@dataclass(frozen=True)
class ExtensionField:
    """A function w(t, r) on the half-space, radial in x."""

    evaluate: Callable[[float, float], float]
    s: float
    m: float
    source: RadialFunction | None = None

    def __call__(self, t, r) -> float:
        return self.evaluate(t, r)

    @classmethod
    def from_trace(cls, u: RadialFunction, s: float, m: float, method: str = "fourier") -> "ExtensionField":
        return cls(lambda t, r: float(extend_radial(u, s, m, t, r, method).value), s, m, u)

    @classmethod
    def profile(cls, s: float, m: float) -> "ExtensionField":
        """theta(m t), the extension of the constant function 1."""
        return cls(lambda t, r: float(_theta_clamped(s, np.array([m * t]))[0]), s, m)


def extension_pde_residual(w: ExtensionField, t: float, r: float, h: float) -> float:
    """Centered-difference residual of -div(t^{1-2s} grad w) + m^2 t^{1-2s} w.

    In cylindrical coordinates with x radial in R^3 the operator divided
    by t^{1-2s} reads -w_tt - (1-2s)/t w_t - w_rr - (2/r) w_r + m^2 w;
    that normalized form is returned.  Needs t >= 4h and r >= 4h.
    """
    if not (h > 0.0 and t >= 4.0 * h and r >= 4.0 * h):
        raise DomainError("need h > 0, t >= 4h and r >= 4h")
    s, m = w.s, w.m
    c = w(t, r)
    tp, tm = w(t + h, r), w(t - h, r)
    rp, rm = w(t, r + h), w(t, r - h)
    w_tt = (tp - 2.0 * c + tm) / (h * h)
    w_t = (tp - tm) / (2.0 * h)
    w_rr = (rp - 2.0 * c + rm) / (h * h)
    w_r = (rp - rm) / (2.0 * h)
    return -w_tt - (1.0 - 2.0 * s) / t * w_t - w_rr - 2.0 / r * w_r + m * m * c


def weighted_flux(u: RadialFunction, s: float, m: float, t: float, r: float) -> float:
    """-t^{1-2s} d/dt w(t, r) from the kernel derivative.

    d/dt w = int d_t P(t, rho) |S^2| rho^2 [M(rho) - u(r)] d rho + u(r) m theta'(mt),
    where M is the mean of u over the sphere of radius rho about x; the
    subtraction removes the near-diagonal cancellation.
    """
    s = _check_extension(s, m, t)
    mean = _SphereMean(u, N_RADIAL, r)
    area = 4.0 * math.pi
    f = lambda rho: area * rho * rho * float(kernel_t_derivative(s, m, t, rho)) * mean.difference(rho)
    reach = r + u.scale
    pts = [0.0, t, 10.0 * t, reach]
    pts = sorted(set(p for p in pts if p <= reach))
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        v, *_ = integrate.quad(f, a, b, limit=400, epsabs=1e-15, epsrel=1e-12, full_output=1)
        total += v
    if mean.u0 != 0.0:
        # past reach the translated profile vanishes and M = 0
        tail, *_ = integrate.quad(lambda p: -area * p * p * float(kernel_t_derivative(s, m, t, p)) * mean.u0,
                                  reach, np.inf, limit=200, epsabs=1e-16, epsrel=1e-12, full_output=1)
        total += tail
    w_t = total + mean.u0 * m * float(_theta_prime_clamped(s, np.array([m * t]))[0])
    return -t ** (1.0 - 2.0 * s) * w_t


FLUX_STEPS = (1e-2, 5e-3, 2.5e-3)


def richardson(ts, values, exponents) -> float:
    """Limit L of v(t) = L + sum_j c_j t^{e_j}, fitted exactly through the points."""
    ts = np.asarray(ts, dtype=float)
    design = np.column_stack([np.ones_like(ts)] + [ts ** e for e in exponents])
    coef = np.linalg.solve(design, np.asarray(values, dtype=float))
    return float(coef[0])


def boundary_flux_check(u: RadialFunction, s: float, m: float, r: float,
                        steps=FLUX_STEPS) -> tuple[float, float]:
    """(lhs, rhs) of -lim t^{1-2s} w_t = kappa_s (-Delta + m^2)^s u at |x| = r.

    lhs extrapolates the weighted flux from the three t values, eliminating
    corrections of order t^{2-2s} and t^2; rhs applies the Fourier
    multiplier directly.
    """
    s = _check_extension(s, m, min(steps))
    if len(steps) != 3:
        raise ValueError("need exactly three t values")
    flux = [weighted_flux(u, s, m, t, r) for t in steps]
    lhs = richardson(steps, flux, (2.0 - 2.0 * s, 2.0))
    if not math.isfinite(lhs):
        raise QuadratureError("flux extrapolation produced a non-finite value")
    rhs = specfun.kappa_s(s) * float(frac_power_radial(s, m * m, u, r).value)
    return lhs, rhs
