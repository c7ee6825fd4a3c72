"""Command-line interface: ``spectral-hardy <subcommand> [flags]``.

Exit codes: 0 success, 1 usage error, 2 marginal / indeterminate /
undefined result, 3 a verification check failed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import angular, classifier, extension, fracops, specfun, verification, witness
from .angular import Constant, CouplingDescriptor, SpectralConfig
from .errors import QuadratureError, SpectralHardyError

EXIT_OK, EXIT_USAGE, EXIT_MARGINAL, EXIT_FAILED = 0, 1, 2, 3
FORMATS = ("json", "csv", "text")
CSV_HEADER = ("N", "s", "coupling", "mu1", "esa", "gamma", "alpha", "margin")
THREADS_ENV = "SPECTRAL_HARDY_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    """Validated command-line settings."""

    subcommand: str
    dimension: int | None
    s: float | None
    m: float
    coupling: str | None
    basis_size: int
    tolerance: float
    output_format: str
    output_path: str | None

    @property
    def spectral(self) -> SpectralConfig:
        return SpectralConfig(basis_size=self.basis_size, tolerance=self.tolerance)


# ---------------------------------------------------------------------------
# formatting

def _num(v) -> str:
    return format(float(v), ".17g")


def _sci(v) -> str:
    return "" if v is None else format(float(v), ".16e")


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return "null"
    if isinstance(v, (float, np.floating)):
        return _num(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, dict):
        return _json_object(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    return json.dumps(v)


def _json_object(d: dict) -> str:
    """JSON with insertion-ordered keys and 17 significant digit floats."""
    return "{" + ", ".join(f"{json.dumps(k)}: {_json_value(v)}" for k, v in d.items()) + "}"


def _csv_bool(v) -> str:
    return "" if v is None else ("true" if v else "false")


def _csv_row(N: int, s: float, coupling: str, rep: classifier.EsaReport) -> str:
    return ",".join([str(N), _sci(s), coupling, _sci(rep.mu1), _csv_bool(rep.esa),
                     _sci(rep.gamma_exp), _sci(rep.alpha_exp), _sci(rep.margin)])


def _text(d: dict) -> str:
    lines = []
    for k, v in d.items():
        if isinstance(v, float):
            v = _num(v)
        elif isinstance(v, bool) or v is None:
            v = _json_value(v)
        lines.append(f"{k}: {v}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# argument handling

def parse_coupling(text: str, dim: int | None = None) -> CouplingDescriptor:
    """Parse ``const:<float>`` or ``fourier:<path>``."""
    kind, sep, value = text.partition(":")
    if not sep or not value:
        raise UsageError(f"bad coupling spec {text!r}: expected const:<float> or fourier:<path>")
    if kind == "const":
        try:
            v = float(value)
        except ValueError:
            raise UsageError(f"bad constant coupling {value!r}") from None
        if not math.isfinite(v):
            raise UsageError("coupling must be finite")
        return Constant(v)
    if kind == "fourier":
        if dim is not None and dim != 2:
            raise UsageError("fourier couplings need --dim 2")
        try:
            return angular.load_fourier_coupling(value)
        except OSError as exc:
            raise UsageError(f"cannot read coupling file: {exc}") from None
    raise UsageError(f"unknown coupling kind {kind!r}")


def parse_range(text: str) -> np.ndarray:
    """Inclusive grid from ``start:stop:step``."""
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"bad range {text!r}: expected start:stop:step") from None
    if not (math.isfinite(start) and math.isfinite(stop) and step > 0.0 and stop >= start):
        raise UsageError("range needs finite start <= stop and step > 0")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    # linspace keeps the endpoints exact when stop - start is a multiple of step
    end = start + (count - 1) * step
    if abs(end - stop) <= 1e-9 * max(1.0, abs(stop)):
        end = stop
    return np.linspace(start, end, count)


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a nonnegative integer") from None
    if n < 0:
        raise UsageError(f"{THREADS_ENV} must be a nonnegative integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--dim", type=int, default=None, help="dimension N")
    common.add_argument("--s", type=float, default=None, help="fractional order s in (0, 1)")
    common.add_argument("--m", type=float, default=0.0, help="mass m >= 0")
    common.add_argument("--coupling", default=None, help="const:<float> or fourier:<path>")
    common.add_argument("--basis-size", type=int, default=64)
    common.add_argument("--tolerance", type=float, default=1e-8)
    common.add_argument("--format", choices=FORMATS, default="text")
    common.add_argument("--output", default=None, help="write to this file instead of stdout")

    parser = _Parser(prog="spectral-hardy",
                     description="Self-adjointness of relativistic Hardy-type operators.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    sub.add_parser("classify", parents=[common], help="decide essential self-adjointness")
    sub.add_parser("mu1", parents=[common], help="first angular eigenvalue")
    p = sub.add_parser("lambda", parents=[common], help="constant coupling lambda(alpha)")
    p.add_argument("--alpha", type=float, required=True)
    p = sub.add_parser("witness-check", parents=[common], help="check the L^2 witness")
    p.add_argument("--b", type=float, default=1.0)
    sub.add_parser("extension-check", parents=[common], help="check the extension identities")
    sub.add_parser("verify-all", parents=[common], help="run every verification suite")
    p = sub.add_parser("sweep", parents=[common], help="classify over a constant coupling grid")
    p.add_argument("--coupling-range", required=True, help="start:stop:step, inclusive")
    return parser


def _run_config(ns: argparse.Namespace) -> RunConfig:
    if ns.basis_size < 4:
        raise UsageError("--basis-size must be at least 4")
    if not (ns.tolerance > 0.0 and math.isfinite(ns.tolerance)):
        raise UsageError("--tolerance must be positive")
    if not (ns.m >= 0.0 and math.isfinite(ns.m)):
        raise UsageError("--m must be a finite nonnegative number")
    return RunConfig(ns.subcommand, ns.dim, ns.s, ns.m, ns.coupling, ns.basis_size,
                     ns.tolerance, ns.format, ns.output)


def _need(cfg: RunConfig, *names: str):
    flags = {"dimension": "--dim", "s": "--s", "coupling": "--coupling"}
    for name in names:
        if getattr(cfg, name) is None:
            raise UsageError(f"{cfg.subcommand} needs {flags[name]}")


# ---------------------------------------------------------------------------
# subcommands; each returns (exit code, output text)

def _report_exit(rep: classifier.EsaReport) -> int:
    return EXIT_OK if rep.status in ("esa", "not-esa") else EXIT_MARGINAL


def cmd_classify(cfg: RunConfig, ns) -> tuple[int, str]:
    _need(cfg, "dimension", "s", "coupling")
    coupling = parse_coupling(cfg.coupling, cfg.dimension)
    rep = classifier.classify(cfg.dimension, cfg.s, cfg.m, coupling, cfg.spectral)
    if cfg.output_format == "json":
        out = rep.to_json()
    elif cfg.output_format == "csv":
        out = ",".join(CSV_HEADER) + "\n" + _csv_row(cfg.dimension, cfg.s, cfg.coupling, rep)
    else:
        out = _text({**rep.as_dict(), "status": rep.status})
    return _report_exit(rep), out


def cmd_mu1(cfg: RunConfig, ns) -> tuple[int, str]:
    _need(cfg, "dimension", "s", "coupling")
    coupling = parse_coupling(cfg.coupling, cfg.dimension)
    res = angular.mu1(cfg.dimension, cfg.s, coupling, cfg.spectral)
    d = {"mu1": res.mu1, "est_error": res.est_error, "converged": res.converged}
    if cfg.output_format == "json":
        out = _json_object(d)
    elif cfg.output_format == "csv":
        out = "N,s,coupling,mu1,est_error\n" + ",".join(
            [str(cfg.dimension), _sci(cfg.s), cfg.coupling, _sci(res.mu1), _sci(res.est_error)])
    else:
        out = _num(res.mu1)
    return (EXIT_OK if res.converged else EXIT_MARGINAL), out


def cmd_lambda(cfg: RunConfig, ns) -> tuple[int, str]:
    _need(cfg, "dimension", "s")
    lam = angular.lambda_of_alpha(cfg.dimension, cfg.s, ns.alpha)
    if cfg.output_format == "json":
        out = _json_object({"alpha": float(ns.alpha), "lambda": lam})
    elif cfg.output_format == "csv":
        out = f"N,s,alpha,lambda\n{cfg.dimension},{_sci(cfg.s)},{_sci(ns.alpha)},{_sci(lam)}"
    else:
        out = _num(lam)
    return EXIT_OK, out


def cmd_witness_check(cfg: RunConfig, ns) -> tuple[int, str]:
    _need(cfg, "s", "coupling")
    dim = 3 if cfg.dimension is None else cfg.dimension
    coupling = parse_coupling(cfg.coupling, dim)
    if not ns.b > 0.0:
        raise UsageError("--b must be positive")
    w = witness.build_witness(dim, cfg.s, ns.b, coupling, cfg.spectral)
    r = np.geomspace(*witness.ODE_R_RANGE, 40)
    ode = float(np.max(np.abs(witness.radial_ode_residual(w, r))))
    # the pairing is radial quadrature in three dimensions; skipped elsewhere
    weak = None
    if dim == 3 and isinstance(coupling, Constant):
        weak = witness.weak_identity_residual(w, fracops.annular_bump(0.5, 2.0))
    d = {"nu1": w.nu1, "in_l2": witness.l2_membership(w).in_l2, "ode_residual_max": ode,
         "weak_residual": weak, "exp_fit": witness.exponential_tail(w)}
    if cfg.output_format == "json":
        out = _json_object(d)
    elif cfg.output_format == "csv":
        out = ",".join(d) + "\n" + ",".join(_csv_bool(v) if isinstance(v, bool) else _sci(v)
                                             for v in d.values())
    else:
        out = _text(d)
    return EXIT_OK, out


EXT_TOL = {"mass": 1e-8, "flux": 1e-3}


def cmd_extension_check(cfg: RunConfig, ns) -> tuple[int, str]:
    _need(cfg, "s")
    if cfg.dimension not in (None, extension.N_RADIAL):
        raise UsageError("extension-check supports --dim 3 only")
    s, m = cfg.s, cfg.m
    specfun.check_s(s)
    mass_err = max(abs(extension.kernel_mass(s, m, t).value - specfun.theta_profile(s, m * t))
                   for t in verification.MASS_T)
    lhs, rhs = extension.boundary_flux_check(fracops.gaussian(), s, m, 0.5)
    flux_err = abs(lhs - rhs) / max(abs(rhs), 1e-300)
    passed = mass_err <= EXT_TOL["mass"] and flux_err <= EXT_TOL["flux"]
    d = {"mass_error_max": mass_err, "flux_lhs": lhs, "flux_rhs": rhs,
         "flux_rel_error": flux_err, "passed": passed}
    if cfg.output_format == "json":
        out = _json_object(d)
    elif cfg.output_format == "csv":
        out = ",".join(d) + "\n" + ",".join(_csv_bool(v) if isinstance(v, bool) else _sci(v)
                                             for v in d.values())
    else:
        out = _text(d)
    return (EXIT_OK if passed else EXIT_FAILED), out


def cmd_verify_all(cfg: RunConfig, ns) -> tuple[int, str]:
    results = verification.run_all()
    if cfg.output_format == "json":
        out = "[" + ", ".join(_json_object({"name": r.name, "passed": r.passed, "seconds": r.seconds,
                                            "detail": r.detail}) for r in results) + "]"
    elif cfg.output_format == "csv":
        out = "name,passed,seconds\n" + "\n".join(
            f"{r.name},{_csv_bool(r.passed)},{_sci(r.seconds)}" for r in results)
    else:
        out = "\n".join(r.line() for r in results)
    return (EXIT_OK if all(r.passed for r in results) else EXIT_FAILED), out


def cmd_sweep(cfg: RunConfig, ns) -> tuple[int, str]:
    _need(cfg, "dimension", "s")
    grid = parse_range(ns.coupling_range)
    spectral = cfg.spectral
    classifier.ProblemSpec(cfg.dimension, cfg.s, cfg.m)

    def one(a: float) -> classifier.EsaReport:
        return classifier.classify(cfg.dimension, cfg.s, cfg.m, Constant(float(a)), spectral)

    workers = thread_count()
    if workers == 0:
        reports = [one(a) for a in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(one, grid))
    if cfg.output_format == "json":
        out = "[" + ", ".join(_json_object({"N": cfg.dimension, "s": cfg.s, "coupling": float(a),
                                            **rep.as_dict()}) for a, rep in zip(grid, reports)) + "]"
    else:
        rows = [_csv_row(cfg.dimension, cfg.s, _sci(a), rep) for a, rep in zip(grid, reports)]
        out = ",".join(CSV_HEADER) + "\n" + "\n".join(rows)
    return EXIT_OK, out


COMMANDS = {
    "classify": cmd_classify,
    "mu1": cmd_mu1,
    "lambda": cmd_lambda,
    "witness-check": cmd_witness_check,
    "extension-check": cmd_extension_check,
    "verify-all": cmd_verify_all,
    "sweep": cmd_sweep,
}


def _wants_json(argv) -> bool:
    argv = list(argv)
    for i, tok in enumerate(argv):
        if tok == "--format=json" or (tok == "--format" and i + 1 < len(argv) and argv[i + 1] == "json"):
            return True
    return False


def _fail(code: int, kind: str, message: str, as_json: bool) -> int:
    if as_json:
        sys.stderr.write(_json_object({"error": kind, "message": message, "exit_code": code}) + "\n")
    else:
        sys.stderr.write(f"spectral-hardy: {kind}: {message}\n")
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    as_json = _wants_json(argv)
    try:
        ns = build_parser().parse_args(argv)
        cfg = _run_config(ns)
        code, out = COMMANDS[cfg.subcommand](cfg, ns)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc), as_json)
    except QuadratureError as exc:
        return _fail(EXIT_MARGINAL, "quadrature", str(exc), as_json)
    except (SpectralHardyError, ValueError) as exc:
        return _fail(EXIT_USAGE, "usage", str(exc), as_json)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(out + "\n")
    else:
        sys.stdout.write(out + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
