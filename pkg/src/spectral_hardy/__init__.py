"""Numerical toolkit for relativistic Schroedinger operators with Hardy-type potentials.

The main entry points are :func:`classify` (essential self-adjointness),
:func:`mu1` (first angular eigenvalue) and :func:`lambda_of_alpha`
(closed-form constant couplings).
"""

from .angular import (Constant, Fourier, Mu1Result, SpectralConfig, alpha_of_lambda, critical_coupling,
                      hardy_constant, lambda_of_alpha, load_fourier_coupling, mu1, mu1_closed_form,
                      mu1_constant, mu1_fourier)
from .classifier import EsaReport, ProblemSpec, classify, decay_exponents
from .errors import DomainError, ParameterRangeError, PoleError, QuadratureError, SpectralHardyError
from .extension import ExtensionField, bessel_kernel, extend_radial, kernel_mass
from .fracops import (QuadResult, RadialFunction, frac_power_radial, homogeneous_norm, kelvin_transform,
                      relativistic_singular_integral)
from .witness import Witness, build_witness

__version__ = "0.1.0"

__all__ = [
    "Constant", "Fourier", "Mu1Result", "SpectralConfig", "alpha_of_lambda", "critical_coupling",
    "hardy_constant", "lambda_of_alpha", "load_fourier_coupling", "mu1", "mu1_closed_form",
    "mu1_constant", "mu1_fourier", "EsaReport", "ProblemSpec", "classify", "decay_exponents",
    "DomainError", "ParameterRangeError", "PoleError", "QuadratureError", "SpectralHardyError",
    "ExtensionField", "bessel_kernel", "extend_radial", "kernel_mass", "QuadResult", "RadialFunction",
    "frac_power_radial", "homogeneous_norm", "kelvin_transform", "relativistic_singular_integral",
    "Witness", "build_witness",
]
