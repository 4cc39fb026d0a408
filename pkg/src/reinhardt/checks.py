"""The invariant suite behind ``reinhardt verify``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import geometry as geo
from .domain import DomainSpec, sample_points
from .oracles import fd_log_kernel_hessian, fs_reference_curvature, mc_moment
from .quadrature import QuadratureConfig, QuadratureError
from .space import (
    _compositions,
    bergman_dimension,
    enumerate_basis,
    in_kernel_window,
    is_square_integrable,
    kernel_coefficients,
    monomial_norm_sq,
    truncated_norm_sq,
    unit_index,
)

PASS, FAIL, SKIPPED = "PASS", "FAIL", "SKIPPED"

# Thresholds shared with the acceptance tests.
CURVATURE_TOL = 1e-8
FS_TOL = 1e-12
B_IDENTITY_TOL = 1e-10
CARTAN_TOL = 1e-13
LAW_TOL = 1e-12
FD_TOL = 1e-6
MC_RELATIVE = 0.02
MC_SIGMAS = 3.0
COEFF_PRECISION = 1e-8
EXPONENT_TOL = 0.1


@dataclass
class CheckResult:
    name: str
    status: str
    detail: str = ""


def _random_directions(rng, count: int, n: int) -> np.ndarray:
    return rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))


def check_dimension(spec: DomainSpec) -> CheckResult:
    n = spec.n
    grid = sorted({spec.a} | {Fraction(k, n - 1) + d for k in range(0, 8) for d in (0, Fraction(1, 7 * (n - 1)))} - {0})
    bad = [a for a in grid if bergman_dimension(DomainSpec(n, a)) != len(enumerate_basis(DomainSpec(n, a)))]
    dim = bergman_dimension(spec)
    detail = f"dim={dim}, grid of {len(grid)} exponents"
    if bad:
        return CheckResult("dimension-consistency", FAIL, f"mismatch at a={bad[0]}")
    return CheckResult("dimension-consistency", PASS, detail)


def check_integrability(spec: DomainSpec, cfg: QuadratureConfig, max_degree: int = 4) -> CheckResult:
    """Every monomial up to ``max_degree``: quadrature verdict vs closed form."""
    checked = 0
    worst = 0.0
    for degree in range(max_degree + 1):
        for p in _compositions(degree, spec.n):
            try:
                norm = monomial_norm_sq(spec, p, cfg)
            except QuadratureError as exc:
                return CheckResult("integrability-agreement", FAIL, f"p={p}: {exc}")
            checked += 1
            if not is_square_integrable(spec, p):
                expected = degree - spec.a_value * (spec.n - 1) + 1
                worst = max(worst, abs(norm.outcome.growth_exponent - expected))
    status = PASS if worst <= EXPONENT_TOL else FAIL
    return CheckResult(
        "integrability-agreement", status, f"{checked} monomials, max exponent error {worst:.3g}"
    )


def check_coefficients(spec: DomainSpec, cfg: QuadratureConfig, workers: int = 1):
    coeffs = kernel_coefficients(spec, cfg, workers)
    worst = float(np.max(coeffs.relative_errors))
    rows = [
        CheckResult(
            "coefficient-precision",
            PASS if worst <= COEFF_PRECISION else FAIL,
            f"max relative error estimate {worst:.3g} (limit {COEFF_PRECISION:g})",
        )
    ]
    tang = coeffs.c[1 : spec.n]
    spread = float(np.max(tang) - np.min(tang))
    allowed = float(np.max(coeffs.errors[1 : spec.n])) * 2 + 1e-15 * float(np.max(tang))
    rows.append(
        CheckResult(
            "coefficient-symmetry",
            PASS if spread <= allowed else FAIL,
            f"spread of c_1..c_(n-1) = {spread:.3g}",
        )
    )
    return coeffs, rows


def check_curvature(K: geo.KernelForm, pts: np.ndarray, rng) -> list[CheckResult]:
    dirs = _random_directions(rng, len(pts), K.n)
    values = np.array([geo.sectional_curvature(K, z, X) for z, X in zip(pts, dirs)])
    mean, spread = float(values.mean()), float(values.std(ddof=1))
    ok = abs(mean - 2) <= CURVATURE_TOL and spread < CURVATURE_TOL
    fs = np.array([fs_reference_curvature(z, X) for z, X in zip(pts, dirs)])
    fs_dev = float(np.max(np.abs(fs - 2)))
    return [
        CheckResult("curvature-constancy", PASS if ok else FAIL, f"mean={mean:.15g}, std={spread:.3g}"),
        CheckResult("fubini-study-oracle", PASS if fs_dev <= FS_TOL else FAIL, f"max |H-2|={fs_dev:.3g}"),
    ]


def check_b_function(K: geo.KernelForm, pts: np.ndarray) -> list[CheckResult]:
    dev = max(abs(geo.b_function(K, z) / geo.b_closed_form(K, z) - 1) for z in pts)
    b0 = geo.b_function(K, np.zeros(K.n))
    gaps = [b0 - geo.b_function(K, z) for z in pts if np.any(z)]
    return [
        CheckResult("b-identity", PASS if dev < B_IDENTITY_TOL else FAIL, f"max relative deviation {dev:.3g}"),
        CheckResult(
            "b-strict-maximum",
            PASS if min(gaps) > 0 else FAIL,
            f"min B(0)-B(z) = {min(gaps):.3g}",
        ),
    ]


def check_cartan(K: geo.KernelForm, pts: np.ndarray) -> CheckResult:
    rep = geo.cartan_conditions(K, pts)
    return CheckResult(
        "cartan-conditions",
        PASS if rep.holds(CARTAN_TOL) else FAIL,
        f"kernel dev {rep.kernel_deviation:.3g}, T dev {rep.t_deviation:.3g}, "
        f"min eig {rep.min_eigenvalue:.6g}",
    )


def check_transformations(K: geo.KernelForm, pts: np.ndarray, rng) -> list[CheckResult]:
    worst = 0.0
    maps = [geo.phase_rotation(rng.uniform(0, 2 * np.pi, K.n)) for _ in range(20)]
    maps += list(geo.tangential_permutations(K.n))
    for F in maps:
        worst = max(worst, geo.check_transformation_law(K, F, pts).max_deviation)
    scaled = geo.check_transformation_law(K, 2 * np.eye(K.n), pts)
    detected = scaled.kernel_deviation > 1e3 * LAW_TOL and scaled.kernel_ratio_max < 0.9
    return [
        CheckResult(
            "transformation-laws",
            PASS if worst < LAW_TOL else FAIL,
            f"{len(maps)} maps, max deviation {worst:.3g}",
        ),
        CheckResult(
            "non-automorphism-detected",
            PASS if detected else FAIL,
            f"scaling by 2: kernel ratio in [{scaled.kernel_ratio_min:.3g}, {scaled.kernel_ratio_max:.3g}]",
        ),
    ]


def check_derivatives(K: geo.KernelForm, pts: np.ndarray, rng) -> CheckResult:
    worst = 0.0
    for z in pts[:10]:
        w = z + 0.05 * _random_directions(rng, 1, K.n)[0]
        for a, b in ((z, z), (z, w)):
            exact = geo.t_matrix(K, a, b)
            approx = fd_log_kernel_hessian(K, a, b)
            worst = max(worst, float(np.max(np.abs(exact - approx)) / np.max(np.abs(exact))))
    return CheckResult("metric-vs-finite-differences", PASS if worst < FD_TOL else FAIL, f"max rel dev {worst:.3g}")


def check_monte_carlo(spec: DomainSpec, cfg: QuadratureConfig, samples: int, seed: int, radial_bound: float = 20.0):
    n = spec.n
    rows = []
    for p in (tuple([0] * n), unit_index(n, 1), unit_index(n, n)):
        if not is_square_integrable(spec, p):
            rows.append(CheckResult(f"monte-carlo p={p}", SKIPPED, "not square integrable"))
            continue
        est = mc_moment(spec, p, radial_bound, samples, seed)
        ref = truncated_norm_sq(spec, p, radial_bound, cfg).value
        rel = abs(est.value - ref) / abs(ref)
        sig = abs(est.value - ref) / est.std_error
        ok = rel <= MC_RELATIVE and sig <= MC_SIGMAS
        rows.append(CheckResult(f"monte-carlo p={p}", PASS if ok else FAIL, f"rel {rel:.3g}, {sig:.2f} std errors"))
    return rows


def run_suite(
    spec: DomainSpec,
    cfg: QuadratureConfig = QuadratureConfig(),
    seed: int = 0,
    samples: int = 1_000_000,
    points: int = 64,
    radial_bound: float = 10.0,
    workers: int = 1,
) -> list[CheckResult]:
    rows = [check_dimension(spec)]
    try:
        rows.append(check_integrability(spec, cfg))
    except QuadratureError as exc:
        rows.append(CheckResult("integrability-agreement", FAIL, str(exc)))
    geometric = [
        "coefficient-precision",
        "coefficient-symmetry",
        "curvature-constancy",
        "fubini-study-oracle",
        "b-identity",
        "b-strict-maximum",
        "cartan-conditions",
        "transformation-laws",
        "non-automorphism-detected",
        "metric-vs-finite-differences",
    ]
    if not in_kernel_window(spec):
        rows += [CheckResult(name, SKIPPED, "a outside 2/(n-1) < a <= 3/(n-1)") for name in geometric]
    else:
        try:
            coeffs, coeff_rows = check_coefficients(spec, cfg, workers)
        except QuadratureError as exc:
            rows.append(CheckResult("coefficient-precision", FAIL, str(exc)))
            return rows
        rows += coeff_rows
        K = geo.KernelForm.from_coefficients(coeffs)
        rng = np.random.default_rng(seed)
        pts = sample_points(spec, points, radial_bound, seed)
        rows += check_curvature(K, pts, rng)
        rows += check_b_function(K, pts)
        rows.append(check_cartan(K, pts))
        rows += check_transformations(K, pts, rng)
        rows.append(check_derivatives(K, pts, rng))
    if bergman_dimension(spec) == 0:
        rows.append(CheckResult("monte-carlo", SKIPPED, "Bergman space is trivial"))
    else:
        try:
            rows += check_monte_carlo(spec, cfg, samples, seed)
        except QuadratureError as exc:
            rows.append(CheckResult("monte-carlo", FAIL, str(exc)))
    return rows


def suite_passed(rows) -> bool:
    return all(r.status != FAIL for r in rows)


def format_table(rows) -> str:
    width = max(len(r.name) for r in rows)
    return "\n".join(f"{r.status:<8} {r.name:<{width}}  {r.detail}" for r in rows)


__all__ = [
    "CheckResult",
    "format_table",
    "run_suite",
    "suite_passed",
]
