"""Bergman space data for D(a): monomial norms, dimension, kernel coefficients."""

from __future__ import annotations

import dataclasses
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .domain import DomainSpec, clamp_point, f_exact
from .quadrature import (
    ProbeResult,
    QuadratureConfig,
    QuadratureError,
    QuadratureOutcome,
    Verdict,
    integrate_half_line,
    integrate_interval,
    probe_divergence,
)

__all__ = [
    "KernelCoefficients",
    "MonomialNorm",
    "OutsideTheoremWindow",
    "VerdictMismatch",
    "as_multi_index",
    "bergman_dimension",
    "degree_bound",
    "enumerate_basis",
    "in_kernel_window",
    "is_square_integrable",
    "kernel_coefficients",
    "moment_integrand",
    "monomial_norm_sq",
    "truncated_norm_sq",
    "unit_index",
]

MultiIndex = tuple[int, ...]


class VerdictMismatch(QuadratureError):
    """Numerical verdict contradicts the closed-form integrability criterion."""


class OutsideTheoremWindow(ValueError):
    """The exponent is outside ``2/(n-1) < a <= 3/(n-1)``."""


def as_multi_index(p: Sequence[int], n: int) -> MultiIndex:
    p = tuple(int(v) for v in p)
    if len(p) != n or any(v < 0 for v in p):
        raise ValueError(f"multi-index must have {n} nonnegative entries, got {p}")
    return p


def unit_index(n: int, k: int) -> MultiIndex:
    """``e_k`` for ``k = 1..n`` (1-based, matching coordinate names)."""
    return tuple(int(j == k - 1) for j in range(n))


def degree_bound(spec: DomainSpec) -> Fraction | float:
    """``(n-1) a``; a monomial is square integrable iff ``|p| + 1`` is below it."""
    return (spec.n - 1) * spec.a


def is_square_integrable(spec: DomainSpec, p: Sequence[int]) -> bool:
    p = as_multi_index(p, spec.n)
    return sum(p) + 1 < degree_bound(spec)


def bergman_dimension(spec: DomainSpec) -> int:
    """Closed-form dimension: ``binom(n+k, k)`` with ``k = ceil((n-1)a) - 2``."""
    m = degree_bound(spec)
    if m <= 1:
        return 0
    k = math.ceil(m) - 2
    return math.comb(spec.n + k, k)


def enumerate_basis(spec: DomainSpec) -> list[MultiIndex]:
    """All square-integrable exponents, graded then lexicographic."""
    m = degree_bound(spec)
    out = []
    degree = 0
    while degree + 1 < m:
        out.extend(_compositions(degree, spec.n))
        degree += 1
    return out


def _compositions(total: int, parts: int):
    """Tuples of ``parts`` nonnegative ints summing to ``total``, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head, *tail)


def in_kernel_window(spec: DomainSpec) -> bool:
    m = degree_bound(spec)
    return 2 < m <= 3


def moment_integrand(spec: DomainSpec, p: Sequence[int]):
    """The 1-D integrand ``prod_k f_{p_k}(rho) * rho**p_n``."""
    p = as_multi_index(p, spec.n)

    def integrand(rho):
        rho = np.asarray(rho, dtype=float)
        out = rho ** p[-1]
        for q in p[:-1]:
            out = out * f_exact(spec, q, rho)
        return out

    return integrand


@dataclass(frozen=True)
class MonomialNorm:
    p: MultiIndex
    norm_sq: float
    outcome: QuadratureOutcome
    probe: ProbeResult | None = None

    @property
    def finite(self) -> bool:
        return math.isfinite(self.norm_sq)

    @property
    def error_estimate(self) -> float:
        return math.pi ** len(self.p) * self.outcome.error_estimate if self.finite else math.inf


@functools.lru_cache(maxsize=512)
def _norm_cached(spec: DomainSpec, p: MultiIndex, cfg: QuadratureConfig) -> MonomialNorm:
    f = moment_integrand(spec, p)
    kink = (clamp_point(spec),)
    scale = math.pi**spec.n
    if is_square_integrable(spec, p):
        outcome = integrate_half_line(f, cfg, breakpoints=kink)
        return MonomialNorm(p, scale * outcome.value, outcome)
    probe = probe_divergence(f, cfg, breakpoints=kink)
    if not probe.diverges:
        raise VerdictMismatch(
            f"{spec}: z^{p} should not be square integrable but the divergence "
            f"probe returned {probe.verdict.value} (exponent {probe.exponent})"
        )
    outcome = QuadratureOutcome(
        math.inf, math.inf, 0, Verdict.DIVERGES, growth_exponent=probe.exponent
    )
    return MonomialNorm(p, math.inf, outcome, probe)


def monomial_norm_sq(spec: DomainSpec, p: Sequence[int], cfg: QuadratureConfig = QuadratureConfig()) -> MonomialNorm:
    """Squared L2 norm of ``z**p`` over the domain.

    Finite norms come from half-line quadrature of the reduced integrand
    times ``pi**n``. For exponents outside the integrable range the
    divergence probe must confirm growth, otherwise ``VerdictMismatch``.
    """
    p = as_multi_index(p, spec.n)
    # The integrand is symmetric in p_1..p_{n-1}; share work across orderings.
    canonical = (*sorted(p[:-1]), p[-1])
    return dataclasses.replace(_norm_cached(spec, canonical, cfg), p=p)


def truncated_norm_sq(
    spec: DomainSpec, p: Sequence[int], radial_bound: float, cfg: QuadratureConfig = QuadratureConfig()
) -> QuadratureOutcome:
    """Integral of ``|z**p|**2`` over the part of the domain with ``|z_n|^2 < radial_bound``.

    Value and error already include the ``pi**n`` factor.
    """
    p = as_multi_index(p, spec.n)
    out = integrate_interval(moment_integrand(spec, p), 0.0, radial_bound, cfg, (clamp_point(spec),))
    scale = math.pi**spec.n
    return QuadratureOutcome(scale * out.value, scale * out.error_estimate, out.panels_used, out.verdict)


@dataclass(frozen=True)
class KernelCoefficients:
    """``c[0] = 1/vol``, ``c[k] = 1/||z_k||^2`` with first-order error estimates."""

    c: np.ndarray
    errors: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 1 or c.size < 2:
            raise ValueError("need at least c0 and c1")
        if not np.all(c > 0):
            raise ValueError("kernel coefficients must be positive")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "errors", np.asarray(self.errors, dtype=float))

    @property
    def n(self) -> int:
        return self.c.size - 1

    @property
    def relative_errors(self) -> np.ndarray:
        return self.errors / self.c


def kernel_coefficients(
    spec: DomainSpec, cfg: QuadratureConfig = QuadratureConfig(), workers: int = 1
) -> KernelCoefficients:
    if not in_kernel_window(spec):
        raise OutsideTheoremWindow(
            f"{spec}: need 2/(n-1) < a <= 3/(n-1) for the kernel to be spanned by 1, z_1..z_n"
        )
    n = spec.n
    indices = [tuple([0] * n)] + [unit_index(n, k) for k in range(1, n + 1)]
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as pool:
            norms = list(pool.map(lambda p: monomial_norm_sq(spec, p, cfg), indices))
    else:
        norms = [monomial_norm_sq(spec, p, cfg) for p in indices]
    values = np.array([m.norm_sq for m in norms])
    errors = np.array([m.error_estimate for m in norms])
    return KernelCoefficients(1.0 / values, errors / values**2)
