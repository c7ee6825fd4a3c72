"""Essential self-adjointness classification from the angular eigenvalue.

The operator (-Delta + m^2)^s - a(x/|x|) |x|^{-2s} on C_c^infty(R^N \\ {0})
is positive definite when mu_1(a) + ((N-2s)/2)^2 > 0, and is then
essentially self-adjoint exactly when

    -mu_1(a) <= ((N-2s)/2)^2 - s^2.

The mass m plays no role in the decision.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import angular
from .angular import Constant, CouplingDescriptor, SpectralConfig
from .errors import DomainError, ParameterRangeError

# JSON field order is part of the output contract
REPORT_FIELDS = ("mu1", "positivity_ok", "esa", "margin", "gamma_exp", "alpha_exp",
                 "critical_lambda", "est_error")

# floor for the marginal band, in units of the problem scale
_ROUNDING_ULPS = 64.0


@dataclass(frozen=True)
class ProblemSpec:
    """Operator parameters: dimension, order, mass and coupling."""

    N: int
    s: float
    m: float = 0.0
    coupling: CouplingDescriptor = field(default_factory=lambda: Constant(0.0))

    def __post_init__(self):
        angular._check_problem(self.N, self.s)
        if not (math.isfinite(self.m) and self.m >= 0.0):
            raise ParameterRangeError("mass m must be a finite nonnegative number")
        if not isinstance(self.coupling, Constant) and self.N != 2:
            raise ParameterRangeError("Fourier couplings are supported only for N = 2")


@dataclass(frozen=True)
class EsaReport:
    """Outcome of :func:`classify`.

    ``esa`` is None when the positivity condition fails, since the
    criterion does not apply there.  ``marginal`` is set when the margin lies
    within the numerical band of zero; the boolean is still reported (with
    the non-strict inequality resolved in favour of self-adjointness) but
    should not be trusted beyond the band.
    """

    mu1: float
    positivity_ok: bool
    esa: bool | None
    margin: float
    gamma_exp: float | None
    alpha_exp: float | None
    critical_lambda: float | None
    est_error: float
    converged: bool = True
    band: float = 0.0
    mass: float = 0.0

    @property
    def marginal(self) -> bool:
        return self.positivity_ok and abs(self.margin) <= self.band

    @property
    def status(self) -> str:
        """One of 'esa', 'not-esa', 'marginal', 'indeterminate', 'undefined'."""
        if not self.converged:
            return "indeterminate"
        if self.esa is None:
            return "undefined"
        if self.marginal:
            return "marginal"
        return "esa" if self.esa else "not-esa"

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in REPORT_FIELDS}

    def to_json(self) -> str:
        """Single-line JSON with fixed field order and 17 significant digits."""
        parts = [f'"{name}": {_json_value(getattr(self, name))}' for name in REPORT_FIELDS]
        return "{" + ", ".join(parts) + "}"


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, float) and not math.isfinite(v):
        return "null"
    if isinstance(v, float):
        return format(v, ".17g")
    return json.dumps(v)


def decay_exponents(N: int, s: float, mu1: float) -> tuple[float, float]:
    """Roots gamma >= alpha of x^2 + (N-2s) x - mu1 = 0.

    These are the power rates r^gamma and r^alpha governing solutions of
    the Hardy problem near the origin.
    """
    N, s = angular._check_problem(N, s)
    half = (N - 2.0 * s) / 2.0
    disc = half * half + mu1
    if not disc >= 0.0:
        raise DomainError("decay exponents need mu1 + ((N-2s)/2)^2 >= 0")
    root = math.sqrt(disc)
    alpha_exp = -half - root
    # gamma from Vieta (gamma * alpha = -mu1) avoids cancellation for small mu1
    gamma_exp = mu1 / (half + root)
    return gamma_exp, alpha_exp


def _margin(N: int, s: float, mu1: float) -> float:
    half = (N - 2.0 * s) / 2.0
    return half * half - s * s + mu1


def report_from_mu1(N: int, s: float, mu1: float, est_error: float = 0.0, converged: bool = True,
                    m: float = 0.0, tolerance: float = 0.0) -> EsaReport:
    """Build the report for a known mu_1 (numeric or closed form)."""
    N, s = angular._check_problem(N, s)
    half = (N - 2.0 * s) / 2.0
    positivity_ok = mu1 + half * half > 0.0
    margin = _margin(N, s, mu1)
    scale = max(1.0, abs(mu1), half * half)
    band = max(est_error, tolerance, _ROUNDING_ULPS * np.finfo(float).eps * scale)
    if positivity_ok:
        gamma_exp, alpha_exp = decay_exponents(N, s, mu1)
        esa = bool(margin >= -band)
    else:
        gamma_exp = alpha_exp = None
        esa = None
    try:
        crit = angular.critical_coupling(N, s)
    except ParameterRangeError:
        crit = None
    return EsaReport(mu1=float(mu1), positivity_ok=bool(positivity_ok), esa=esa, margin=float(margin),
                     gamma_exp=gamma_exp, alpha_exp=alpha_exp, critical_lambda=crit,
                     est_error=float(est_error), converged=bool(converged), band=float(band),
                     mass=float(m))


def classify(N: int, s: float, m: float, coupling: CouplingDescriptor,
             cfg: SpectralConfig | None = None, closed_form: bool = False) -> EsaReport:
    """Decide essential self-adjointness for the given operator.

    With ``closed_form=True`` and a constant coupling inside the range of
    the Gamma map, mu_1 is taken from the closed form instead of the
    eigensolver.  The marginal band is ``max(est_error, cfg.tolerance)``.
    """
    spec = ProblemSpec(N, s, m, coupling)
    cfg = cfg or SpectralConfig()
    if closed_form and isinstance(coupling, Constant):
        exact = angular.mu1_closed_form(spec.N, spec.s, coupling.value)
        if exact is not None:
            return report_from_mu1(spec.N, spec.s, exact, 0.0, True, spec.m, 0.0)
    res = angular.mu1(spec.N, spec.s, coupling, cfg)
    return report_from_mu1(spec.N, spec.s, res.mu1, res.est_error, res.converged, spec.m, cfg.tolerance)
