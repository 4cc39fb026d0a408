"""Command-line interface.

Exit codes: 0 success, 1 a mathematical check failed, 2 usage error.
Floats are written as decimal strings (``repr`` precision) in JSON output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import checks
from . import geometry as geo
from .domain import DomainSpec, contains, f_asymptotic, f_exact, parse_exponent, sample_points
from .quadrature import QuadratureConfig, QuadratureError
from .space import (
    OutsideTheoremWindow,
    VerdictMismatch,
    bergman_dimension,
    enumerate_basis,
    is_square_integrable,
    kernel_coefficients,
    monomial_norm_sq,
)

log = logging.getLogger("reinhardt")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
THREADS_ENV = "REINHARDT_THREADS"


class UsageError(Exception):
    pass


def _num(x) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _complex_str(z: complex) -> str:
    return f"{_num(z.real)}{'+' if z.imag >= 0 or math.isnan(z.imag) else '-'}{_num(abs(z.imag))}j"


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class RunConfig:
    n: int
    a: str
    radius_scale: int = 1
    rel_tol: float = 1e-10
    seed: int = 0
    output_format: str = "json"
    threads: int = field(default_factory=_default_threads)

    @property
    def spec(self) -> DomainSpec:
        return DomainSpec(self.n, parse_exponent(self.a), self.radius_scale)

    @property
    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(rel_tol=self.rel_tol)

    def to_argv(self) -> list[str]:
        return [
            "--n", str(self.n),
            "--a", self.a,
            "--radius-scale", str(self.radius_scale),
            "--rel-tol", repr(self.rel_tol),
            "--seed", str(self.seed),
            "--format", self.output_format,
            "--threads", str(self.threads),
        ]

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        return cls(args.n, args.a, args.radius_scale, args.rel_tol, args.seed, args.format, args.threads)


def _exponent_text(text: str) -> str:
    try:
        value = parse_exponent(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not value > 0:
        raise argparse.ArgumentTypeError("a must be positive")
    return text.strip()


def _parse_complex_vector(text: str, n: int, what: str) -> np.ndarray:
    try:
        values = [complex(tok.strip().replace(" ", "")) for tok in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse {what} {text!r}; use e.g. '0.5+0.1j,0.3'") from None
    if len(values) != n:
        raise UsageError(f"{what} needs {n} coordinates, got {len(values)}")
    return np.array(values)


def _multi_index(text: str, n: int) -> tuple[int, ...]:
    try:
        p = tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse multi-index {text!r}") from None
    if len(p) != n or any(v < 0 for v in p):
        raise UsageError(f"multi-index needs {n} nonnegative entries")
    return p


def _coefficients(cfg: RunConfig):
    try:
        return kernel_coefficients(cfg.spec, cfg.quadrature, cfg.threads)
    except OutsideTheoremWindow as exc:
        raise UsageError(str(exc)) from None


def cmd_dim(cfg: RunConfig, args) -> tuple[int, dict, list[dict]]:
    spec = cfg.spec
    basis = enumerate_basis(spec)
    dim = bergman_dimension(spec)
    out = {"n": spec.n, "a": str(spec.a), "radius_scale": spec.radius_scale, "dimension": dim,
           "basis": [list(p) for p in basis]}
    code = EXIT_OK if dim == len(basis) else EXIT_FAILED
    return code, out, [{"index": i, "p": " ".join(map(str, p))} for i, p in enumerate(basis)]


def cmd_norm(cfg: RunConfig, args):
    spec = cfg.spec
    p = _multi_index(args.p, spec.n)
    predicted = is_square_integrable(spec, p)
    out = {"n": spec.n, "a": str(spec.a), "p": list(p), "square_integrable": predicted}
    try:
        norm = monomial_norm_sq(spec, p, cfg.quadrature)
    except VerdictMismatch as exc:
        out.update(verdict="mismatch", error=str(exc))
        return EXIT_FAILED, out, [out]
    except QuadratureError as exc:
        out.update(verdict="inconclusive", error=str(exc))
        return EXIT_FAILED, out, [out]
    out.update(
        verdict=norm.outcome.verdict.value,
        norm_sq=_num(norm.norm_sq),
        error_estimate=_num(norm.error_estimate),
        panels=norm.outcome.panels_used,
    )
    if norm.outcome.growth_exponent is not None:
        out["growth_exponent"] = _num(norm.outcome.growth_exponent)
        out["expected_exponent"] = _num(sum(p) - spec.a_value * (spec.n - 1) + 1)
    return EXIT_OK, out, [out]


def cmd_coeffs(cfg: RunConfig, args):
    coeffs = _coefficients(cfg)
    out = {"n": cfg.n, "a": cfg.a, "c": [_num(c) for c in coeffs.c],
           "errors": [_num(e) for e in coeffs.errors]}
    rows = [{"k": k, "c": _num(c), "error": _num(e)} for k, (c, e) in enumerate(zip(coeffs.c, coeffs.errors))]
    return EXIT_OK, out, rows


def _points_and_directions(cfg: RunConfig, args, count: int):
    spec = cfg.spec
    if args.point is not None:
        pts = _parse_complex_vector(args.point, spec.n, "point")[None, :]
        if not contains(spec, pts[0]):
            log.warning("point %s lies outside %s; using the kernel formula anyway", args.point, spec)
    else:
        pts = sample_points(spec, count, 10.0, cfg.seed)
    rng = np.random.default_rng(cfg.seed + 1)
    if getattr(args, "direction", None) is not None:
        dirs = np.repeat(_parse_complex_vector(args.direction, spec.n, "direction")[None, :], len(pts), 0)
    else:
        dirs = rng.normal(size=pts.shape) + 1j * rng.normal(size=pts.shape)
    return pts, dirs


def cmd_curvature(cfg: RunConfig, args):
    K = geo.KernelForm.from_coefficients(_coefficients(cfg))
    pts, dirs = _points_and_directions(cfg, args, args.trials)
    try:
        values = [geo.sectional_curvature(K, z, X) for z, X in zip(pts, dirs)]
    except geo.DegenerateDirection as exc:
        raise UsageError(str(exc)) from None
    rows = [{"trial": i, "point": ",".join(_complex_str(c) for c in z), "curvature": _num(v)}
            for i, (z, v) in enumerate(zip(pts, values))]
    spread = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    out = {"n": cfg.n, "a": cfg.a, "trials": rows, "mean": _num(np.mean(values)), "stddev": _num(spread)}
    code = EXIT_OK if abs(np.mean(values) - 2) <= checks.CURVATURE_TOL and spread < checks.CURVATURE_TOL else EXIT_FAILED
    return code, out, rows


def cmd_bfunction(cfg: RunConfig, args):
    K = geo.KernelForm.from_coefficients(_coefficients(cfg))
    z = _parse_complex_vector(args.point, cfg.n, "point") if args.point else np.zeros(cfg.n, dtype=complex)
    b = geo.b_function(K, z)
    closed = geo.b_closed_form(K, z)
    dev = abs(b / closed - 1)
    out = {"n": cfg.n, "a": cfg.a, "point": [_complex_str(c) for c in z], "b": _num(b),
           "closed_form": _num(closed), "relative_deviation": _num(dev)}
    return (EXIT_OK if dev < checks.B_IDENTITY_TOL else EXIT_FAILED), out, [out]


def _rho_grid(text: str) -> list[float]:
    try:
        grid = [float(tok) for tok in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse rho grid {text!r}") from None
    if not grid or any(not r > 0 for r in grid):
        raise UsageError("rho grid values must be positive")
    return grid


def cmd_profile(cfg: RunConfig, args):
    spec = cfg.spec
    grid = _rho_grid(args.rho_grid)
    rows = []
    for rho in grid:
        exact = f_exact(spec, args.q, rho)
        asym = f_asymptotic(spec, args.q, rho)
        rows.append({"rho": _num(rho), "f_exact": _num(exact), "f_asymptotic": _num(asym), "ratio": _num(exact / asym)})
    return EXIT_OK, {"n": spec.n, "a": str(spec.a), "q": args.q, "profile": rows}, rows


def cmd_verify(cfg: RunConfig, args):
    rows = checks.run_suite(cfg.spec, cfg.quadrature, cfg.seed, args.samples, workers=cfg.threads)
    records = [{"check": r.name, "status": r.status, "detail": r.detail} for r in rows]
    out = {"n": cfg.n, "a": cfg.a, "passed": checks.suite_passed(rows), "checks": records}
    if cfg.output_format == "table":
        out["table"] = checks.format_table(rows)
    return (EXIT_OK if checks.suite_passed(rows) else EXIT_FAILED), out, records


COMMANDS = {
    "dim": (cmd_dim, "dimension and monomial basis of the Bergman space"),
    "norm": (cmd_norm, "squared norm of a monomial, or its divergence verdict"),
    "coeffs": (cmd_coeffs, "kernel coefficients c0..cn"),
    "curvature": (cmd_curvature, "holomorphic sectional curvature samples"),
    "bfunction": (cmd_bfunction, "B-function against its closed form"),
    "profile": (cmd_profile, "f_q(rho) against its asymptotic term (CSV)"),
    "verify": (cmd_verify, "run the invariant suite and print a pass/fail table"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, required=True, help="complex dimension (>= 2)")
    common.add_argument("--a", type=_exponent_text, required=True, help="exponent, decimal or ratio p/q")
    common.add_argument("--radius-scale", type=int, choices=(1, 2), default=1)
    common.add_argument("--rel-tol", type=float, default=1e-10)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv", "table"), default=None)
    common.add_argument("--threads", type=int, default=_default_threads(),
                        help=f"worker threads (default from ${THREADS_ENV})")
    common.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")

    parser = argparse.ArgumentParser(prog="reinhardt", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "norm":
            p.add_argument("--p", required=True, help="multi-index, comma separated")
        if name in ("curvature", "bfunction"):
            p.add_argument("--point", help="complex coordinates, e.g. '0.5+0.1j,0.3'")
        if name == "curvature":
            p.add_argument("--direction", help="tangent direction, same syntax as --point")
            p.add_argument("--trials", type=int, default=50)
        if name == "profile":
            p.add_argument("--q", type=int, default=0)
            p.add_argument("--rho-grid", default="1e2,1e3,1e4,1e5,1e6")
        if name == "verify":
            p.add_argument("--samples", type=int, default=1_000_000, help="Monte Carlo samples")
    return parser


def _render(fmt: str, out: dict, rows: list[dict]) -> str:
    if fmt == "json":
        return json.dumps(out, indent=2) + "\n"
    if fmt == "table" and "table" in out:
        return out["table"] + "\n"
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in row.items()})
    return buf.getvalue()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    fmt = args.format or ("csv" if args.command == "profile" else "table" if args.command == "verify" else "json")
    args.format = fmt
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    if not args.rel_tol > 0:
        parser.error("--rel-tol must be positive")
    try:
        cfg = RunConfig.from_args(args)
        cfg.spec  # validate n, a
        handler = COMMANDS[args.command][0]
        code, out, rows = handler(cfg, args)
    except (UsageError, ValueError) as exc:
        print(f"reinhardt {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = _render(fmt, out, rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
