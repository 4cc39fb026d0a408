"""The unbounded Reinhardt domains D(a) and their enlarged variants.

A point z of C^n lies in the domain when, for every k < n,

    | |z_k|^2 - |z_n|^2 | < s * (|z_n|^2 + 1)^(-a)

with ``s = radius_scale`` (1 for D(a), 2 for the enlarged domain). In the
squared moduli ``r = |z_k|^2`` and ``rho = |z_n|^2`` the condition confines
``r`` to the radial interval ``I(rho)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np
from scipy.special import comb

__all__ = [
    "DomainSpec",
    "RadialInterval",
    "as_points",
    "clamp_point",
    "contains",
    "f_asymptotic",
    "f_exact",
    "parse_exponent",
    "radial_interval",
    "sample_points",
]

Exponent = Union[Fraction, float]


def parse_exponent(text: str | int | float | Fraction) -> Exponent:
    """Parse ``a`` from ``"p/q"``, a decimal string, or a number.

    Strings always become exact fractions (``"0.9"`` -> ``9/10``) so that
    case boundaries like ``a = (k+2)/(n-1)`` are represented exactly.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise ValueError("exponent must be a number")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        return text
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse exponent {text!r}") from exc


@dataclass(frozen=True)
class DomainSpec:
    n: int
    a: Exponent
    radius_scale: int = 1

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension n must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        a = parse_exponent(self.a)
        if not math.isfinite(a) or not a > 0:
            raise ValueError(f"exponent a must be positive, got {self.a!r}")
        object.__setattr__(self, "a", a)
        if self.radius_scale not in (1, 2):
            raise ValueError(f"radius_scale must be 1 or 2, got {self.radius_scale!r}")

    @property
    def a_value(self) -> float:
        return float(self.a)

    @property
    def exact(self) -> bool:
        return isinstance(self.a, Fraction)

    def __str__(self):
        name = "D" if self.radius_scale == 1 else "D~"
        return f"{name}(n={self.n}, a={self.a})"


@dataclass(frozen=True)
class RadialInterval:
    lo: float
    hi: float

    @property
    def length(self) -> float:
        return self.hi - self.lo


def _half_width(spec: DomainSpec, rho):
    return spec.radius_scale * (np.asarray(rho, dtype=float) + 1.0) ** (-spec.a_value)


def _bounds(spec: DomainSpec, rho):
    rho = np.asarray(rho, dtype=float)
    delta = _half_width(spec, rho)
    return np.maximum(rho - delta, 0.0), rho + delta


def radial_interval(spec: DomainSpec, rho: float) -> RadialInterval:
    if rho < 0:
        raise ValueError(f"rho must be nonnegative, got {rho}")
    lo, hi = _bounds(spec, rho)
    return RadialInterval(float(lo), float(hi))


def clamp_point(spec: DomainSpec) -> float:
    """The radius where ``rho = s * (rho + 1)**(-a)``.

    Below it the radial interval is clamped at 0 and ``f_exact`` switches
    formula, so it is a kink of every moment integrand.
    """
    from scipy.optimize import brentq

    s, a = spec.radius_scale, spec.a_value
    return brentq(lambda r: r - s * (r + 1.0) ** (-a), 0.0, float(s), xtol=1e-15, rtol=1e-15)


def f_exact(spec: DomainSpec, q: int, rho):
    """Moment ``f_q(rho) = int_{I(rho)} r**q dr``, vectorized over ``rho``.

    Where the interval is not clamped, ``(rho+d)**m - (rho-d)**m`` is
    expanded into its odd binomial terms; the direct difference loses every
    digit once ``d`` falls below ``rho * 1e-16``.
    """
    if q < 0 or int(q) != q:
        raise ValueError(f"q must be a nonnegative integer, got {q!r}")
    q = int(q)
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("rho must be nonnegative")
    m = q + 1
    delta = _half_width(spec, rho)
    open_side = rho >= delta

    odd = np.zeros_like(rho)
    for j in range(1, m + 1, 2):
        odd = odd + comb(m, j, exact=True) * rho ** (m - j) * delta**j
    unclamped = 2.0 * odd / m
    clamped = (rho + delta) ** m / m
    out = np.where(open_side, unclamped, clamped)
    return float(out) if out.ndim == 0 else out


def f_asymptotic(spec: DomainSpec, q: int, rho):
    """Leading large-``rho`` term ``2 s rho**(q - a)`` of :func:`f_exact`."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise ValueError("rho must be positive")
    out = 2.0 * spec.radius_scale * rho ** (q - spec.a_value)
    return float(out) if out.ndim == 0 else out


def as_points(z, n: int) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.shape[-1:] != (n,):
        raise ValueError(f"expected points with {n} coordinates, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("point coordinates must be finite")
    return z


def contains(spec: DomainSpec, z):
    """Membership test; ``z`` may be one point or an array of shape (..., n)."""
    z = as_points(z, spec.n)
    sq = np.abs(z) ** 2
    rho = sq[..., -1]
    bound = spec.radius_scale * (rho + 1.0) ** (-spec.a_value)
    inside = np.all(np.abs(sq[..., :-1] - rho[..., None]) < bound[..., None], axis=-1)
    return bool(inside) if inside.ndim == 0 else inside


def sample_points(spec: DomainSpec, count: int, radial_bound: float = 10.0, seed: int = 0) -> np.ndarray:
    """Draw ``count`` points of the domain as a ``(count, n)`` complex array.

    ``|z_n|^2`` is uniform on ``[0, radial_bound]``, each other ``|z_k|^2``
    uniform on the radial interval, phases uniform. This is not the volume
    measure. Draws that round onto the boundary are redrawn.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if not radial_bound > 0:
        raise ValueError("radial_bound must be positive")
    rng = np.random.default_rng(seed)
    n = spec.n
    out = np.empty((count, n), dtype=complex)
    todo = np.arange(count)
    while todo.size:
        m = todo.size
        rho = rng.uniform(0.0, radial_bound, size=m)
        lo, hi = _bounds(spec, rho)
        r = rng.uniform(lo[:, None], hi[:, None], size=(m, n - 1))
        sq = np.concatenate([r, rho[:, None]], axis=1)
        phase = rng.uniform(0.0, 2 * np.pi, size=(m, n))
        pts = np.sqrt(sq) * np.exp(1j * phase)
        ok = contains(spec, pts)
        out[todo[ok]] = pts[ok]
        todo = todo[~ok]
    return out
