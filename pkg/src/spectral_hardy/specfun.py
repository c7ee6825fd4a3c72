"""Special functions used throughout the package.

Gamma is a Lanczos approximation (g = 7, nine coefficients) with the
reflection formula below 1/2.  K_nu is computed from the integral
representation

    K_nu(r) = int_0^inf exp(-r cosh t) cosh(nu t) dt

by the trapezoidal rule, which converges geometrically for this analytic,
doubly-exponentially decaying integrand.  I_nu is summed from its ascending
series in log space; all terms are positive for nu >= 0, so the sum is
stable on the whole supported box.

Supported box: s in [0.05, 0.95], |nu| <= 50, r in [1e-6, 100].
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError, ParameterRangeError, PoleError

S_MIN, S_MAX = 0.05, 0.95
NU_MAX = 50.0
R_MIN, R_MAX = 1e-6, 100.0

_LANCZOS_G = 7.0
_LANCZOS_P = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_MAX = math.log(np.finfo(float).max)

# trapezoid step for the K_nu integral; error ~ exp(-2 pi^2 / (h^2 r)) at r = R_MAX
_K_STEP = 0.05
_K_CHUNK = 2048


def check_s(s: float) -> float:
    s = float(s)
    if not (S_MIN <= s <= S_MAX):
        raise ParameterRangeError(f"s={s} outside supported range [{S_MIN}, {S_MAX}]")
    return s


def _check_order(nu: float) -> float:
    nu = float(nu)
    if not math.isfinite(nu) or abs(nu) > NU_MAX:
        raise ParameterRangeError(f"Bessel order {nu} outside |nu| <= {NU_MAX}")
    return nu


def _check_radius(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any(~np.isfinite(r)) or np.any(r <= 0.0):
        raise DomainError("Bessel functions require r > 0")
    if np.any(r < R_MIN) or np.any(r > R_MAX):
        raise ParameterRangeError(f"r outside supported range [{R_MIN}, {R_MAX}]")
    return r


def _sinpi(x: np.ndarray) -> np.ndarray:
    # argument reduction keeps sin(pi x) accurate near the integers
    y = np.mod(x, 2.0)
    return np.sin(np.pi * np.where(y > 1.0, y - 2.0, y))


def _lanczos_log(x: np.ndarray) -> np.ndarray:
    """log Gamma(x) for x >= 0.5 (no sign needed there)."""
    z = x - 1.0
    acc = np.full_like(z, _LANCZOS_P[0])
    for i, p in enumerate(_LANCZOS_P[1:], start=1):
        acc = acc + p / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (z + 0.5) * np.log(t) - t + np.log(acc)


def _gamma_positive(x: np.ndarray) -> np.ndarray:
    z = x - 1.0
    acc = np.full_like(z, _LANCZOS_P[0])
    for i, p in enumerate(_LANCZOS_P[1:], start=1):
        acc = acc + p / (z + i)
    t = z + _LANCZOS_G + 0.5
    # split the power so that t**(z+1/2) does not overflow before exp(-t) scales it
    half = t ** (0.5 * (z + 0.5))
    return math.sqrt(2.0 * math.pi) * half * (half * np.exp(-t)) * acc


def gamma(x):
    """Gamma function for real arguments; scalar or array input.

    Raises PoleError at non-positive integers and OverflowError when the
    result exceeds the double range.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)):
        raise DomainError("gamma requires finite input")
    if np.any((xa <= 0.0) & (xa == np.round(xa))):
        raise PoleError("gamma has poles at non-positive integers")
    if np.any(xa > 171.6):
        raise OverflowError("gamma overflows for x > 171.6")
    out = np.empty_like(xa)
    hi = xa >= 0.5
    with np.errstate(over="ignore"):
        out[hi] = _gamma_positive(xa[hi])
        lo = ~hi
        if np.any(lo):
            xl = xa[lo]
            out[lo] = np.pi / (_sinpi(xl) * _gamma_positive(1.0 - xl))
    if np.any(~np.isfinite(out)):
        raise OverflowError("gamma overflow")
    return out.item() if out.ndim == 0 else out


def lgamma(x):
    """log|Gamma(x)|; scalar or array input."""
    xa = np.asarray(x, dtype=float)
    if np.any((xa <= 0.0) & (xa == np.round(xa))):
        raise PoleError("lgamma has poles at non-positive integers")
    out = np.empty_like(xa)
    hi = xa >= 0.5
    out[hi] = _lanczos_log(xa[hi])
    lo = ~hi
    if np.any(lo):
        xl = xa[lo]
        out[lo] = math.log(math.pi) - np.log(np.abs(_sinpi(xl))) - _lanczos_log(1.0 - xl)
    return out.item() if out.ndim == 0 else out


def _log_cosh(y: np.ndarray) -> np.ndarray:
    y = np.abs(y)
    return y + np.log1p(np.exp(-2.0 * y)) - math.log(2.0)


def _log_bessel_k(nu: float, r: np.ndarray) -> np.ndarray:
    """log K_nu(r) for nu >= 0 and a 1-D array r > 0, no range checks."""
    out = np.empty_like(r)
    for lo in range(0, r.size, _K_CHUNK):
        rc = r[lo:lo + _K_CHUNK]
        t_peak = np.arcsinh(nu / rc)
        level = rc * np.cosh(t_peak) - nu * t_peak + 45.0
        # smallest T (on a doubling ladder) past which the integrand is < e^-45 of its peak
        delta = np.full_like(rc, 0.5)
        for _ in range(60):
            short = rc * np.cosh(t_peak + delta) - nu * (t_peak + delta) < level
            if not np.any(short):
                break
            delta = np.where(short, 2.0 * delta, delta)
        t_max = float(np.max(t_peak + delta))
        t = np.arange(0.0, t_max + _K_STEP, _K_STEP)
        log_f = -rc[:, None] * np.cosh(t)[None, :] + _log_cosh(nu * t)[None, :]
        peak = log_f.max(axis=1)
        w = np.exp(log_f - peak[:, None])
        total = _K_STEP * (w.sum(axis=1) - 0.5 * w[:, 0])
        out[lo:lo + _K_CHUNK] = peak + np.log(total)
    return out


def log_bessel_k(nu: float, r):
    """Natural log of K_nu(r); avoids the overflow of K for small r, large nu."""
    nu = abs(_check_order(nu))
    ra = _check_radius(r)
    out = _log_bessel_k(nu, np.atleast_1d(ra).ravel()).reshape(ra.shape)
    return out.item() if out.ndim == 0 else out


def bessel_k(nu: float, r):
    """Modified Bessel function of the second kind K_nu(r), real order.

    K_{-nu} = K_nu is used for negative orders.  Raises OverflowError when
    the value exceeds the double range (large nu, tiny r).
    """
    lk = np.asarray(log_bessel_k(nu, r))
    if np.any(lk > _LOG_MAX):
        raise OverflowError(f"K_{nu}(r) overflows double precision")
    out = np.exp(lk)
    return out.item() if out.ndim == 0 else out


def _log_bessel_i_series(nu: float, r: np.ndarray) -> np.ndarray:
    """log I_nu(r) from the ascending series, nu >= 0."""
    k_max = int(np.max(r)) + 60
    k = np.arange(k_max, dtype=float)
    log_half = np.log(0.5 * r)
    log_terms = ((2.0 * k[None, :] + nu) * log_half[:, None]
                 - lgamma(k + 1.0)[None, :] - lgamma(k + nu + 1.0)[None, :])
    return logsumexp(log_terms, axis=1)


def bessel_i(nu: float, r):
    """Modified Bessel function of the first kind I_nu(r), real order.

    Negative orders use I_{-nu} = I_nu + (2/pi) sin(nu pi) K_nu.
    """
    nu = _check_order(nu)
    ra = _check_radius(r)
    flat = np.atleast_1d(ra).ravel()
    order = abs(nu)
    lv = _log_bessel_i_series(order, flat)
    if np.any(lv > _LOG_MAX):
        raise OverflowError(f"I_{nu}(r) overflows double precision")
    val = np.exp(lv)
    if nu < 0.0 and order != round(order):
        val = val + (2.0 / math.pi) * math.sin(order * math.pi) * np.exp(_log_bessel_k(order, flat))
    out = val.reshape(ra.shape)
    return out.item() if out.ndim == 0 else out


def bessel_k_derivative(nu: float, r):
    """K_nu'(r) = -(nu/r) K_nu(r) - K_{nu-1}(r)."""
    nu = _check_order(nu)
    if abs(nu - 1.0) > NU_MAX:
        raise ParameterRangeError("order nu - 1 leaves the supported box")
    ra = _check_radius(r)
    return -(nu / ra) * bessel_k(nu, ra) - bessel_k(nu - 1.0, ra)


def bessel_i_derivative(nu: float, r):
    """I_nu'(r) = I_{nu+1}(r) + (nu/r) I_nu(r)."""
    nu = _check_order(nu)
    ra = _check_radius(r)
    return bessel_i(nu + 1.0, ra) + (nu / ra) * bessel_i(nu, ra)


_THETA_SERIES_R = 0.5
_THETA_SERIES_TERMS = 12


def _theta_series(s: float, r: np.ndarray) -> np.ndarray:
    # theta(r) = Gamma(1-s) [sum (r/2)^{2k}/(k! Gamma(k+1-s)) - (r/2)^{2s} sum (r/2)^{2k}/(k! Gamma(k+1+s))]
    q = (0.5 * r) ** 2
    a = np.zeros_like(r)
    b = np.zeros_like(r)
    for k in range(_THETA_SERIES_TERMS - 1, -1, -1):
        a = a * q + 1.0 / (math.factorial(k) * gamma(k + 1.0 - s))
        b = b * q + 1.0 / (math.factorial(k) * gamma(k + 1.0 + s))
    return gamma(1.0 - s) * (a - (0.5 * r) ** (2.0 * s) * b)


def theta_profile(s: float, r):
    """Extension profile theta(r) = (2/Gamma(s)) (r/2)^s K_s(r), theta(0) = 1.

    theta solves theta'' + (1-2s)/r theta' - theta = 0.  Small arguments use
    the expansion in I_{+-s}, which also covers r < 1e-6.
    """
    s = check_s(s)
    ra = np.asarray(r, dtype=float)
    if np.any(ra < 0.0) or np.any(~np.isfinite(ra)):
        raise DomainError("theta_profile requires r >= 0")
    if np.any(ra > R_MAX):
        raise ParameterRangeError(f"r outside supported range [0, {R_MAX}]")
    flat = np.atleast_1d(ra).ravel()
    out = np.empty_like(flat)
    small = flat <= _THETA_SERIES_R
    out[small] = _theta_series(s, flat[small])
    out[flat == 0.0] = 1.0
    big = ~small
    if np.any(big):
        rb = flat[big]
        out[big] = np.exp(math.log(2.0) - lgamma(s) + s * np.log(0.5 * rb) + _log_bessel_k(s, rb))
    out = out.reshape(ra.shape)
    return out.item() if out.ndim == 0 else out


def theta_derivative(s: float, r):
    """theta'(r) = -(2/Gamma(s)) (r/2)^s K_{1-s}(r) for r > 0."""
    s = check_s(s)
    ra = _check_radius(r)
    lk = _log_bessel_k(1.0 - s, np.atleast_1d(ra).ravel()).reshape(ra.shape)
    out = -np.exp(math.log(2.0) - lgamma(s) + s * np.log(0.5 * ra) + lk)
    return out.item() if out.ndim == 0 else out


def kappa_s(s: float) -> float:
    """kappa_s = Gamma(1-s) / (2^{2s-1} Gamma(s))."""
    s = check_s(s)
    return gamma(1.0 - s) / (2.0 ** (2.0 * s - 1.0) * gamma(s))
