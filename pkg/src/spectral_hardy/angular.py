"""First eigenvalue mu_1(a) of the weighted angular problem on S^N_+.

For a zonal function psi(theta_1) and x = theta_1^2 the Rayleigh quotient
reduces to

    [2 int x^{1-s} (1-x)^{N/2} psi'^2 dx - kappa_s a psi(0)^2]
    / [1/2 int x^{-s} (1-x)^{(N-2)/2} psi^2 dx]

(the common factor |S^{N-1}| cancels).  Near the equator x = 0 the
eigenfunction has the Frobenius form F(x) + x^s G(x), so the trial space is
spanned by Legendre polynomials in x and x^s times Legendre polynomials.
Every Galerkin integral then has a Jacobi weight x^A (1-x)^B times a
polynomial and is evaluated exactly by Gauss-Jacobi quadrature.

For N = 2 and a coupling given by Fourier coefficients, psi is expanded as
sum_m e^{i m tau} R_m(x); mode m carries the pole factor (1-x)^{|m|/2} and
the modes couple only through the equator term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Union

import numpy as np
import scipy.linalg
from scipy.optimize import brentq
from scipy.special import roots_jacobi

from . import specfun
from .errors import DomainError, ParameterRangeError


@dataclass(frozen=True)
class Constant:
    """Constant coupling a(theta') = value, any dimension."""

    value: float


@dataclass(frozen=True)
class Fourier:
    """Coupling a(tau) = sum_k coeffs[k] e^{i k tau} on the circle (N = 2 only).

    ``coeffs`` maps k to the complex coefficient; it must be Hermitian,
    coeffs[-k] == conj(coeffs[k]), so that a is real.
    """

    coeffs: dict

    def __post_init__(self):
        for k, c in self.coeffs.items():
            other = self.coeffs.get(-k)
            if other is None or abs(complex(other) - complex(c).conjugate()) > 1e-12 * (1.0 + abs(c)):
                raise ValueError(f"Fourier coefficients not Hermitian at k={k}")

    @classmethod
    def from_pairs(cls, pairs: dict) -> "Fourier":
        """Build from a partial table, completing missing -k entries by conjugation."""
        full = {int(k): complex(v) for k, v in pairs.items()}
        for k, v in list(full.items()):
            full.setdefault(-k, v.conjugate())
        return cls(full)

    @property
    def max_order(self) -> int:
        return max((abs(k) for k in self.coeffs), default=0)

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        val = sum(complex(c) * np.exp(1j * k * tau) for k, c in self.coeffs.items())
        return np.real(val)

    def shifted(self, delta: float) -> "Fourier":
        """The coupling a + delta."""
        out = dict(self.coeffs)
        out[0] = complex(out.get(0, 0.0)) + delta
        return Fourier(out)


CouplingDescriptor = Union[Constant, Fourier]


def load_fourier_coupling(path) -> Fourier:
    """Read a coupling file with lines ``k re im``; '#' starts a comment.

    Missing negative (or positive) orders are filled in by Hermitian
    completion.  Conflicting explicit entries raise ValueError.
    """
    pairs = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'k re im'")
        k = int(parts[0])
        if k in pairs:
            raise ValueError(f"{path}:{lineno}: duplicate entry for k={k}")
        pairs[k] = complex(float(parts[1]), float(parts[2]))
    if 0 in pairs and abs(pairs[0].imag) > 1e-14:
        raise ValueError("the k=0 coefficient must be real")
    return Fourier.from_pairs(pairs)


@dataclass(frozen=True)
class SpectralConfig:
    basis_size: int = 64
    quad_points: int | None = None
    fourier_modes: int = 6
    tolerance: float = 1e-8

    def __post_init__(self):
        if self.basis_size < 4:
            raise ValueError("basis_size must be >= 4")
        if self.quad_points is None:
            object.__setattr__(self, "quad_points", 2 * self.basis_size + 8)
        if self.quad_points < 2 * self.basis_size + 8:
            raise ValueError("quad_points must be >= 2*basis_size + 8")
        if self.fourier_modes < 0:
            raise ValueError("fourier_modes must be >= 0")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")

    def with_basis(self, k: int) -> "SpectralConfig":
        return SpectralConfig(k, 2 * k + 8, self.fourier_modes, self.tolerance)


@dataclass
class Mu1Result:
    """Outcome of a first-eigenvalue solve.

    ``coeffs`` has one row per Fourier mode (a single row for constant
    coupling) holding the coefficients of [J_0, ..., J_{K-1}, x^s], where J_j is
    the Jacobi polynomial P_j^{((N-2)/2+|m|, -s)}(2x-1) and x = theta_1^2;
    mode m carries the extra factor (1-x)^{|m|/2}.  The
    eigenfunction is normalized to unit weighted L^2 norm on S^N_+ and its
    sign fixed so that ``trace`` (the equator mean of psi_1) is positive.
    """

    mu1: float
    coeffs: np.ndarray
    trace: float
    converged: bool
    est_error: float
    N: int
    s: float
    modes: tuple = (0,)

    def eigenfunction(self, theta1, tau=0.0):
        """psi_1 at polar height theta1 in [0, 1] and azimuth tau (N = 2)."""
        u = np.asarray(theta1, dtype=float)
        x = u * u
        k = self.coeffs.shape[1] - 1
        out = np.zeros(np.broadcast(u, np.asarray(tau)).shape, dtype=complex)
        for row, m in zip(self.coeffs, self.modes):
            basis = _basis_values(x, self.N, self.s, m, k)
            radial = (1.0 - x) ** (abs(m) / 2.0) * (basis @ row)
            out = out + radial * np.exp(1j * m * np.asarray(tau, dtype=float))
        return np.real(out)

    def equator_flux(self) -> float:
        """lim_{theta1 -> 0} theta1^{1-2s} d psi/d theta1 of the m = 0 mode.

        In x = theta1^2 this is 2 s times the coefficient of x^s at x = 0.
        """
        row = self.coeffs[self.modes.index(0)]
        return float(np.real(2.0 * self.s * row[-1]))


def _jacobi_values(y: np.ndarray, k: int, alpha: float, beta: float) -> np.ndarray:
    """P_j^{(alpha, beta)}(y) for j < k by the three-term recurrence."""
    p = np.empty((y.size, max(k, 1)))
    p[:, 0] = 1.0
    if k > 1:
        p[:, 1] = (alpha + 1.0) + 0.5 * (alpha + beta + 2.0) * (y - 1.0)
    ab = alpha + beta
    for n in range(2, k):
        c = 2.0 * n + ab
        a1 = 2.0 * n * (n + ab) * (c - 2.0)
        a2 = (c - 1.0) * (alpha * alpha - beta * beta)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (n + alpha - 1.0) * (n + beta - 1.0) * c
        p[:, n] = ((a2 + a3 * y) * p[:, n - 1] - a4 * p[:, n - 2]) / a1
    return p[:, :k]


def _jacobi(x: np.ndarray, k: int, alpha: float, beta: float):
    """P_j^{(alpha, beta)}(2x-1) and its x-derivative for j < k, shape (len(x), k).

    The parameters are chosen per mode so that the polynomial family is
    orthogonal under that mode's mass weight, which keeps the Gram matrix
    well conditioned for large |m|.
    """
    y = 2.0 * np.asarray(x, dtype=float).ravel() - 1.0
    p = _jacobi_values(y, k, alpha, beta)
    dp = np.zeros_like(p)
    if k > 1:
        # d/dy P_j^{(a,b)} = (j+a+b+1)/2 P_{j-1}^{(a+1,b+1)}; dy/dx = 2
        q = _jacobi_values(y, k - 1, alpha + 1.0, beta + 1.0)
        dp[:, 1:] = q * (np.arange(1, k) + alpha + beta + 1.0)
    return p, dp


def _poly_params(N: int, s: float, m: int) -> tuple[float, float]:
    return (N - 2) / 2.0 + abs(m), -s


def _basis_values(x: np.ndarray, N: int, s: float, m: int, k: int) -> np.ndarray:
    """The k polynomial functions followed by x^s, without the pole factor."""
    x = np.asarray(x, dtype=float)
    p, _ = _jacobi(x, k, *_poly_params(N, s, m))
    vals = np.hstack([p, (x.ravel() ** s)[:, None]])
    return vals.reshape(x.shape + (k + 1,))


def _edge_vector(N: int, s: float, m: int, k: int) -> np.ndarray:
    """Basis values at the equator x = 0 (the x^s function vanishes there)."""
    return _basis_values(np.zeros(1), N, s, m, k)[0]


@lru_cache(maxsize=256)
def _jacobi_rule(a_exp: float, b_exp: float, n: int):
    """Nodes/weights for int_0^1 x^a (1-x)^b g(x) dx."""
    y, w = roots_jacobi(n, b_exp, a_exp)
    return 0.5 * (1.0 + y), w * 2.0 ** (-a_exp - b_exp - 1.0)


def _family(x: np.ndarray, sigma: float, k: int, deriv: bool, params) -> np.ndarray:
    """Polynomial factor (or its x-derivative) of each function in a family.

    The smooth family is the k Jacobi polynomials; the singular family is
    the single function x^s, whose polynomial factor is 1.
    """
    if sigma == 0.0:
        p, dp = _jacobi(x, k, *params)
        return dp if deriv else p
    return np.zeros((x.size, 1)) if deriv else np.ones((x.size, 1))


def _terms(sigma: float, e: float):
    """Derivative of x^sigma (1-x)^e p(x) as a list of (coef, dx, dy, use_dp).

    Each term is coef * x^{sigma+dx} (1-x)^{e+dy} * (p or p').
    """
    out = []
    if sigma != 0.0:
        out.append((sigma, -1.0, 0.0, False))
    if e != 0.0:
        out.append((-e, 0.0, -1.0, False))
    if sigma == 0.0:
        out.append((1.0, 0.0, 0.0, True))
    return out


@lru_cache(maxsize=128)
def _mode_matrices(N: int, s: float, m: int, k: int, n_quad: int):
    """Stiffness and mass matrices of size k+1 for angular mode m.

    Basis: (1-x)^{|m|/2} J_j(x) for j < k, then (1-x)^{|m|/2} x^s.
    """
    e = abs(m) / 2.0
    params = _poly_params(N, s, m)
    fams = ((0.0, slice(0, k), k), (s, slice(k, k + 1), 1))
    stiff = np.zeros((k + 1, k + 1))
    mass = np.zeros((k + 1, k + 1))
    for si, sli, _ in fams:
        for sj, slj, _ in fams:
            blk_s = 0.0
            # 2 int x^{1-s} (1-x)^{N/2} b_i' b_j'
            for ci, dxi, dyi, di in _terms(si, e):
                for cj, dxj, dyj, dj in _terms(sj, e):
                    x, w = _jacobi_rule(si + sj + dxi + dxj + 1.0 - s,
                                        2.0 * e + dyi + dyj + N / 2.0, n_quad)
                    vi = _family(x, si, k, di, params)
                    vj = _family(x, sj, k, dj, params)
                    blk_s = blk_s + 2.0 * ci * cj * (vi.T * w) @ vj
            x, w = _jacobi_rule(si + sj - s, 2.0 * e + (N - 2) / 2.0, n_quad)
            vi, vj = _family(x, si, k, False, params), _family(x, sj, k, False, params)
            blk_m = 0.5 * (vi.T * w) @ vj
            if m != 0:
                # (m^2/2) int x^{-s} (1-x)^{(N-2)/2 - 1} |b|^2, N = 2
                x, w = _jacobi_rule(si + sj - s, 2.0 * e + (N - 2) / 2.0 - 1.0, n_quad)
                vi, vj = _family(x, si, k, False, params), _family(x, sj, k, False, params)
                blk_s = blk_s + 0.5 * m * m * (vi.T * w) @ vj
            stiff[sli, slj] = blk_s
            mass[sli, slj] = blk_m
    return 0.5 * (stiff + stiff.T), 0.5 * (mass + mass.T)


def _sphere_area(dim: int) -> float:
    """Surface measure of the unit sphere S^dim."""
    return 2.0 * math.pi ** ((dim + 1) / 2.0) / specfun.gamma((dim + 1) / 2.0)


def _lowest_eig(a: np.ndarray, b: np.ndarray):
    """Lowest eigenpair of the symmetric-definite pencil (a, b).

    The basis is rescaled to unit mass diagonal, the pencil reduced to
    standard form with the Cholesky factor of b, and the reduced matrix
    handed to a dense symmetric eigensolver.
    """
    d = 1.0 / np.sqrt(np.real(np.diag(b)))
    a = a * d[:, None] * d[None, :]
    b = b * d[:, None] * d[None, :]
    chol = scipy.linalg.cholesky(b, lower=True)
    tmp = scipy.linalg.solve_triangular(chol, a, lower=True)
    reduced = scipy.linalg.solve_triangular(chol, tmp.conj().T, lower=True).conj().T
    reduced = 0.5 * (reduced + reduced.conj().T)
    vals, vecs = scipy.linalg.eigh(reduced, subset_by_index=[0, 0])
    vec = scipy.linalg.solve_triangular(chol.conj().T, vecs[:, 0], lower=False)
    return float(vals[0]), vec * d


def _check_problem(N: int, s: float):
    s = specfun.check_s(s)
    if int(N) != N or N < 1:
        raise ParameterRangeError("dimension N must be a positive integer")
    if not N > 2.0 * s:
        raise ParameterRangeError("the theory requires N > 2s")
    return int(N), s


def _solve_constant(N: int, s: float, a: float, k: int, n_quad: int):
    stiff, mass = _mode_matrices(N, s, 0, k, n_quad)
    # rank-one equator term in psi(0)^2
    edge = _edge_vector(N, s, 0, k)
    stiff = stiff - specfun.kappa_s(s) * a * np.outer(edge, edge)
    mu, vec = _lowest_eig(stiff, mass)
    norm = vec @ mass @ vec * _sphere_area(N - 1)
    vec = vec / math.sqrt(norm)
    trace = float(edge @ vec)
    if trace < 0.0:
        vec, trace = -vec, -trace
    return mu, vec, trace


def _refined(cfg: SpectralConfig) -> tuple[int, int]:
    k2 = 2 * cfg.basis_size
    return k2, max(cfg.quad_points, 2 * k2 + 8)


def mu1_constant(N: int, s: float, a: float, cfg: SpectralConfig | None = None) -> Mu1Result:
    """mu_1(a) for a constant coupling a.

    The value is the Rayleigh-Ritz minimum at ``cfg.basis_size`` polynomial
    functions; ``est_error`` is its change when the basis size is doubled.
    """
    cfg = cfg or SpectralConfig()
    N, s = _check_problem(N, s)
    a = float(a)
    if not math.isfinite(a):
        raise DomainError("coupling must be finite")
    k = cfg.basis_size
    mu, vec, trace = _solve_constant(N, s, a, k, cfg.quad_points)
    mu_fine, _, _ = _solve_constant(N, s, a, *_refined(cfg))
    est = abs(mu - mu_fine)
    return Mu1Result(mu, vec[None, :], trace, est <= cfg.tolerance, est, N, s, (0,))


def _solve_fourier(s: float, coupling: Fourier, k: int, n_quad: int, n_modes: int):
    modes = tuple(range(-n_modes, n_modes + 1))
    dim = k + 1
    size = dim * len(modes)
    # real coefficients give a real symmetric pencil, which is much cheaper
    real = all(complex(v).imag == 0.0 for v in coupling.coeffs.values())
    dtype = float if real else complex
    stiff = np.zeros((size, size), dtype=dtype)
    mass = np.zeros((size, size), dtype=dtype)
    for idx, m in enumerate(modes):
        sm, mm = _mode_matrices(2, s, m, k, n_quad)
        sl = slice(idx * dim, (idx + 1) * dim)
        stiff[sl, sl] = sm
        mass[sl, sl] = mm
    # equator values R_m(0); the pole factor (1-x)^{|m|/2} equals 1 at x = 0
    edge = np.zeros((len(modes), size))
    for idx, m in enumerate(modes):
        edge[idx, idx * dim:(idx + 1) * dim] = _edge_vector(2, s, m, k)
    coupling_matrix = np.zeros((len(modes), len(modes)), dtype=dtype)
    for i, mi in enumerate(modes):
        for j, mj in enumerate(modes):
            c = complex(coupling.coeffs.get(mi - mj, 0.0))
            coupling_matrix[i, j] = c.real if real else c
    stiff = stiff - specfun.kappa_s(s) * (edge.T @ coupling_matrix @ edge)
    mu, vec = _lowest_eig(stiff, mass)
    norm = np.real(np.conj(vec) @ mass @ vec) * 2.0 * math.pi
    vec = vec / math.sqrt(norm)
    rows = vec.astype(complex).reshape(len(modes), dim)
    e0 = _edge_vector(2, s, 0, k)
    r0 = rows[modes.index(0)] @ e0
    rows = rows * (abs(r0) / r0 if abs(r0) > 0 else 1.0)
    return mu, rows, float(np.real(rows[modes.index(0)] @ e0)), modes


def mu1_fourier(s: float, coupling: Fourier, cfg: SpectralConfig | None = None) -> Mu1Result:
    """mu_1(a) on S^2_+ for a coupling given by Fourier coefficients on the circle."""
    cfg = cfg or SpectralConfig()
    _, s = _check_problem(2, s)
    n_modes = max(cfg.fourier_modes, coupling.max_order)
    k = cfg.basis_size
    mu, rows, trace, modes = _solve_fourier(s, coupling, k, cfg.quad_points, n_modes)
    mu_fine, *_ = _solve_fourier(s, coupling, *_refined(cfg), n_modes)
    est = abs(mu - mu_fine)
    return Mu1Result(mu, rows, trace, est <= cfg.tolerance, est, 2, s, modes)


def mu1(N: int, s: float, coupling: CouplingDescriptor, cfg: SpectralConfig | None = None) -> Mu1Result:
    """Dispatch on the coupling type."""
    if isinstance(coupling, Constant):
        return mu1_constant(N, s, coupling.value, cfg)
    if N != 2:
        raise ParameterRangeError("Fourier couplings are supported only for N = 2")
    return mu1_fourier(s, coupling, cfg)


# ---------------------------------------------------------------------------
# closed-form Gamma map


def _half_gap(N: int, s: float) -> float:
    return (N - 2.0 * s) / 2.0


def lambda_of_alpha(N: int, s: float, alpha: float) -> float:
    """Constant coupling whose mu_1 equals alpha^2 - ((N-2s)/2)^2.

    lambda(alpha) = 2^{2s} G((N+2s+2a)/4) G((N+2s-2a)/4) / (G((N-2s-2a)/4) G((N-2s+2a)/4)).
    """
    N, s = _check_problem(N, s)
    alpha = float(alpha)
    if not 0.0 < alpha < _half_gap(N, s):
        raise ParameterRangeError(f"alpha must lie in (0, {(N - 2 * s) / 2})")
    return _lambda_raw(N, s, alpha)


def _lambda_raw(N: int, s: float, alpha: float) -> float:
    num = specfun.lgamma((N + 2 * s + 2 * alpha) / 4.0) + specfun.lgamma((N + 2 * s - 2 * alpha) / 4.0)
    den = specfun.lgamma((N - 2 * s - 2 * alpha) / 4.0) + specfun.lgamma((N - 2 * s + 2 * alpha) / 4.0)
    return 2.0 ** (2.0 * s) * math.exp(num - den)


def hardy_constant(N: int, s: float) -> float:
    """lambda(0+) = 2^{2s} G((N+2s)/4)^2 / G((N-2s)/4)^2, the supremum of lambda."""
    N, s = _check_problem(N, s)
    return _lambda_raw(N, s, 0.0)


def alpha_of_lambda(N: int, s: float, lam: float) -> float:
    """Inverse of lambda_of_alpha on (0, hardy_constant) by bracketed root finding."""
    N, s = _check_problem(N, s)
    top = hardy_constant(N, s)
    if not 0.0 < lam < top:
        raise ParameterRangeError(f"lambda must lie in (0, {top})")
    hi = _half_gap(N, s)
    return brentq(lambda al: _lambda_raw(N, s, al) - lam, 0.0, hi * (1.0 - 1e-15),
                  xtol=1e-15, rtol=1e-15, maxiter=200)


def critical_coupling(N: int, s: float) -> float:
    """lambda(s) = 2^{2s} Gamma((N+4s)/4) / Gamma((N-4s)/4); requires N > 4s."""
    N, s = _check_problem(N, s)
    if not N > 4.0 * s:
        raise ParameterRangeError("critical coupling formula requires N > 4s")
    return 2.0 ** (2.0 * s) * math.exp(specfun.lgamma((N + 4 * s) / 4.0) - specfun.lgamma((N - 4 * s) / 4.0))


def mu1_closed_form(N: int, s: float, a: float) -> float | None:
    """mu_1(a) from the Gamma map when 0 <= a < lambda(0+), else None."""
    N, s = _check_problem(N, s)
    if a == 0.0:
        return 0.0
    if 0.0 < a < hardy_constant(N, s):
        return alpha_of_lambda(N, s, a) ** 2 - _half_gap(N, s) ** 2
    return None

