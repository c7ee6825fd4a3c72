"""Independent reference computations shared by the test modules."""

import mpmath as mp
import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq


def lambda_mp(N, s, alpha):
    """Constant coupling with mu_1 = alpha^2 - ((N-2s)/2)^2, in extended precision."""
    g = mp.gamma
    return 2 ** (2 * mp.mpf(s)) * (g((N + 2 * s + 2 * alpha) / 4) * g((N + 2 * s - 2 * alpha) / 4)
                                   / (g((N - 2 * s - 2 * alpha) / 4) * g((N - 2 * s + 2 * alpha) / 4)))


def _shoot(mu, N, a, v0=1e-6):
    """Equator mismatch of the solution bounded at the pole, for s = 1/2.

    At s = 1/2 the weight u^{1-2s} is trivial and the flux condition is
    (1-u^2)^{N/2} psi'(0) = -a psi(0).
    """
    def rhs(u, y):
        w = 1.0 - u * u
        return [y[1] / w ** (N / 2), -mu * w ** ((N - 2) / 2) * y[0]]
    u0 = 1.0 - v0
    c = -mu / N
    y0 = [1.0 + c * v0, (1.0 - u0 * u0) ** (N / 2) * (-c)]
    sol = solve_ivp(rhs, (u0, 0.0), y0, method="DOP853", rtol=1e-12, atol=1e-14)
    psi, flux = sol.y[:, -1]
    return flux + a * psi


def shooting_mu1(N, a, lo, hi, points=60):
    """Lowest mu in [lo, hi] satisfying the equator condition (s = 1/2)."""
    grid = np.linspace(lo, hi, points)
    vals = [_shoot(m, N, a) for m in grid]
    i = next(j for j in range(points - 1) if vals[j] * vals[j + 1] < 0)
    return brentq(_shoot, grid[i], grid[i + 1], args=(N, a), xtol=1e-14)
