"""Independent cross-checks: Monte Carlo moments and finite-difference derivatives.

Nothing here imports derivative code from :mod:`reinhardt.geometry`; the
finite-difference routines only evaluate kernels and potentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Callable

import numpy as np

from .domain import DomainSpec, _bounds, as_points
from .space import as_multi_index

__all__ = [
    "MonteCarloEstimate",
    "fd_log_kernel_hessian",
    "fd_sectional_curvature",
    "fs_reference_curvature",
    "mc_inner_product",
    "mc_moment",
    "wirtinger_fd",
]

_BLOCK = 1 << 17


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    std_error: float
    samples: int
    seed: int

    def within(self, reference: float, sigmas: float = 3.0) -> bool:
        return abs(self.value - reference) <= sigmas * self.std_error


def _block_sizes(samples: int):
    full, rest = divmod(samples, _BLOCK)
    return [_BLOCK] * full + ([rest] if rest else [])


def _draw(spec: DomainSpec, rng, m: int, radial_bound: float):
    """Squared moduli ``(m, n)`` and the importance weight of each draw."""
    rho = rng.uniform(0.0, radial_bound, size=m)
    lo, hi = _bounds(spec, rho)
    r = rng.uniform(lo[:, None], hi[:, None], size=(m, spec.n - 1))
    weight = math.pi**spec.n * radial_bound * (hi - lo) ** (spec.n - 1)
    return np.concatenate([r, rho[:, None]], axis=1), weight


def _combine(blocks):
    """Merge per-block (count, mean, M2) in fixed order (Chan et al.)."""
    n_tot, mean, m2 = 0, 0.0, 0.0
    for n_b, mean_b, m2_b in blocks:
        delta = mean_b - mean
        total = n_tot + n_b
        mean += delta * n_b / total
        m2 += m2_b + delta**2 * n_tot * n_b / total
        n_tot = total
    return n_tot, mean, m2


def mc_moment(
    spec: DomainSpec, p, radial_bound: float, samples: int = 1_000_000, seed: int = 0
) -> MonteCarloEstimate:
    """Estimate ``int |z^p|^2 dV`` over the domain cut at ``|z_n|^2 < radial_bound``.

    ``|z_n|^2`` is drawn uniformly on ``[0, radial_bound]`` and each
    ``|z_k|^2`` uniformly on its radial interval; the weight
    ``pi^n * radial_bound * prod(interval lengths)`` is the inverse sampling
    density in the reduced coordinates.
    """
    p = np.array(as_multi_index(p, spec.n))
    if samples < 2:
        raise ValueError("need at least two samples")
    children = np.random.SeedSequence(seed).spawn(len(_block_sizes(samples)))
    stats = []
    for size, child in zip(_block_sizes(samples), children):
        rng = np.random.default_rng(child)
        sq, weight = _draw(spec, rng, size, radial_bound)
        vals = weight * np.prod(sq**p, axis=1)
        mean = float(vals.mean())
        stats.append((size, mean, float(np.sum((vals - mean) ** 2))))
    count, mean, m2 = _combine(stats)
    std = math.sqrt(m2 / (count - 1))
    return MonteCarloEstimate(mean, std / math.sqrt(count), count, seed)


def mc_inner_product(
    spec: DomainSpec, p, q, radial_bound: float, samples: int = 200_000, seed: int = 0
) -> tuple[complex, float]:
    """Estimate ``int z^p conj(z^q) dV`` on the truncated domain.

    Returns the complex estimate and the larger of the standard errors of
    its real and imaginary parts.
    """
    p = np.array(as_multi_index(p, spec.n))
    q = np.array(as_multi_index(q, spec.n))
    rng = np.random.default_rng(seed)
    sq, weight = _draw(spec, rng, samples, radial_bound)
    theta = rng.uniform(0.0, 2 * np.pi, size=sq.shape)
    z = np.sqrt(sq) * np.exp(1j * theta)
    vals = weight * np.prod(z**p, axis=1) * np.conj(np.prod(z**q, axis=1))
    se = max(np.std(vals.real, ddof=1), np.std(vals.imag, ddof=1)) / math.sqrt(samples)
    return complex(vals.mean()), float(se)


def _as_kernel_fn(kernel) -> Callable:
    if callable(kernel):
        return kernel
    c = np.asarray(kernel.c, dtype=float)
    return lambda z, w: c[0] + np.sum(c[1:] * z * np.conj(w))


def fd_log_kernel_hessian(kernel, z, w, h: float = 1e-3) -> np.ndarray:
    """Finite-difference ``d^2 log K / d z_c d conj(w_r)`` stored at ``[r, c]``.

    ``kernel`` is a :class:`~reinhardt.geometry.KernelForm` or any callable
    ``K(z, w)``. Each Wirtinger operator is split into real and imaginary
    partials, every mixed partial uses the 4-point central stencil, and one
    Richardson step combines steps ``h`` and ``h/2``.
    """
    K = _as_kernel_fn(kernel)
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    n = z.size
    k0 = K(z, w)

    def logk(dz, dw):
        return np.log(K(z + dz, w + dw) / k0)

    def estimate(step):
        out = np.zeros((n, n), dtype=complex)
        for r, c in product(range(n), range(n)):
            total = 0j
            # d_z = (d_x - i d_y)/2, d_conj(w) = (d_u + i d_v)/2
            for zdir, zcoef in ((1.0, 1.0), (1j, -1j)):
                for wdir, wcoef in ((1.0, 1.0), (1j, 1j)):
                    acc = 0j
                    for sz, sw in product((1, -1), repeat=2):
                        dz = np.zeros(n, dtype=complex)
                        dw = np.zeros(n, dtype=complex)
                        dz[c] = sz * step * zdir
                        dw[r] = sw * step * wdir
                        acc += sz * sw * logk(dz, dw)
                    total += zcoef * wcoef * acc / (4 * step * step)
            out[r, c] = total / 4
        return out

    return (4 * estimate(h / 2) - estimate(h)) / 3


def wirtinger_fd(phi: Callable, z, ops, h: float) -> complex:
    """Mixed Wirtinger derivative of a real function ``phi`` on C^n.

    ``ops`` lists ``(index, conjugate)`` pairs; ``(k, False)`` is ``d/dz_k``
    and ``(k, True)`` is ``d/d conj(z_k)``. Central differences, one
    Richardson step.
    """
    z = np.asarray(z, dtype=complex)
    m = len(ops)

    def estimate(step):
        total = 0j
        for parts in product((0, 1), repeat=m):
            coef = 1.0 + 0j
            dirs = []
            for (k, conj), imag in zip(ops, parts):
                e = np.zeros(z.size, dtype=complex)
                e[k] = 1j if imag else 1.0
                dirs.append(e)
                coef *= 0.5 * ((1j if conj else -1j) if imag else 1.0)
            acc = 0.0
            for signs in product((1, -1), repeat=m):
                shift = sum(s * d for s, d in zip(signs, dirs)) * step
                acc += np.prod(signs) * phi(z + shift)
            total += coef * acc / (2 * step) ** m
        return total

    return (4 * estimate(h / 2) - estimate(h)) / 3


def fd_sectional_curvature(phi: Callable, z, X, h: float = 1e-2) -> float:
    """Holomorphic sectional curvature of the Kahler potential ``phi`` by finite differences.

    Uses the same sign convention as the analytic path, so the Fubini-Study
    potential gives +2 and the unit-disk Bergman potential gives -1.
    """
    z = np.asarray(z, dtype=complex)
    X = np.asarray(X, dtype=complex)
    n = z.size
    idx = range(n)
    G = np.array([[wirtinger_fd(phi, z, [(i, False), (j, True)], h) for j in idx] for i in idx])
    dG = np.array([[[wirtinger_fd(phi, z, [(k, False), (i, False), (j, True)], h)
                     for j in idx] for i in idx] for k in idx])
    dbarG = np.array([[[wirtinger_fd(phi, z, [(l, True), (i, False), (j, True)], h)
                        for j in idx] for i in idx] for l in idx])
    ddbarG = np.array([[[[wirtinger_fd(phi, z, [(k, False), (l, True), (i, False), (j, True)], h)
                          for j in idx] for i in idx] for l in idx] for k in idx])
    Xc = np.conj(X)
    norm = float(np.real(np.einsum("ij,i,j->", G, X, Xc)))
    if not norm > 0:
        raise ValueError("degenerate direction")
    ginv = np.linalg.inv(G)
    R = -np.transpose(ddbarG, (2, 3, 0, 1)) + np.einsum("kip,pq,lqj->ijkl", dG, ginv, dbarG)
    return float(np.real(np.einsum("ijkl,i,j,k,l->", R, X, Xc, X, Xc))) / norm**2


def fs_reference_curvature(z, X) -> float:
    """Curvature of ``log(1 + |z|^2)`` from its closed-form curvature tensor.

    For this potential ``R_{i jbar k lbar} = g_{i jbar} g_{k lbar} +
    g_{i lbar} g_{k jbar}`` with ``g_{i jbar} = delta_ij / S - conj(z_i) z_j / S^2``
    and ``S = 1 + |z|^2``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    X = as_points(X, z.size)
    if not np.any(X):
        raise ValueError("degenerate direction")
    s = 1.0 + float(np.sum(np.abs(z) ** 2))
    g = np.eye(z.size) / s - np.outer(np.conj(z), z) / s**2
    R = np.einsum("ij,kl->ijkl", g, g) + np.einsum("il,kj->ijkl", g, g)
    Xc = np.conj(X)
    num = np.einsum("ijkl,i,j,k,l->", R, X, Xc, X, Xc)
    den = np.einsum("ij,i,j->", g, X, Xc)
    return float(np.real(num / den**2))
