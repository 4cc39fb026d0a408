"""Kernel, metric, curvature and invariants for kernels ``c0 + sum c_k z_k conj(w_k)``.

Matrix layout
-------------
Every n x n matrix returned here (metric, T-matrix) uses the layout

    M[r, c] = d^2 log K / (d z_c  d conj(w_r)),

i.e. rows follow the anti-holomorphic index. With this layout a linear
biholomorphism ``F(z) = A z`` acts as ``M1 = A^H M2 A`` and the metric as a
quadratic form is ``X^H M X``. The ``(i, j)`` entry of the conventional
``g_{i jbar}`` is therefore ``M[j, i]``.

Curvature convention
--------------------
With ``G[i, j] = g_{i jbar}``,

    R_{i jbar k lbar} = -d_k dbar_l G[i, j] + (d_k G  G^{-1}  dbar_l G)[i, j]
    H(X) = R(X, Xbar, X, Xbar) / g(X, Xbar)^2

which gives +2 for the Fubini-Study potential ``log(1 + |z|^2)`` and -1
for the unit-disk potential ``-2 log(1 - |z|^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .domain import as_points
from .space import KernelCoefficients

__all__ = [
    "CartanReport",
    "DegenerateDirection",
    "KernelForm",
    "TransformationReport",
    "ZeroKernel",
    "b_closed_form",
    "b_function",
    "cartan_conditions",
    "check_transformation_law",
    "curvature_tensor",
    "kernel_eval",
    "metric_at",
    "metric_derivatives",
    "permutation_map",
    "phase_rotation",
    "rescale_to_fubini_study",
    "sectional_curvature",
    "t_matrix",
    "tangential_permutations",
]

HERMITIAN_TOL = 1e-13


class ZeroKernel(ZeroDivisionError):
    pass


class DegenerateDirection(ValueError):
    pass


@dataclass(frozen=True)
class KernelForm:
    """``K(z, w) = c[0] + sum_k c[k] z_k conj(w_k)``."""

    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 1 or c.size < 2 or not np.all(c > 0):
            raise ValueError("need positive coefficients c0, c1, ..., cn")
        object.__setattr__(self, "c", c)

    @classmethod
    def from_coefficients(cls, coeffs: KernelCoefficients) -> "KernelForm":
        return cls(coeffs.c)

    @classmethod
    def fubini_study(cls, n: int) -> "KernelForm":
        return cls(np.ones(n + 1))

    @property
    def n(self) -> int:
        return self.c.size - 1

    @property
    def c0(self) -> float:
        return float(self.c[0])

    @property
    def ck(self) -> np.ndarray:
        return self.c[1:]


def _hermitian(m: np.ndarray) -> np.ndarray:
    sym = 0.5 * (m + m.conj().T)
    if np.max(np.abs(m - sym)) > HERMITIAN_TOL * max(1.0, np.max(np.abs(m))):
        raise ArithmeticError("matrix is not Hermitian within tolerance")
    return sym


def kernel_eval(K: KernelForm, z, w) -> complex:
    z = as_points(z, K.n)
    w = as_points(w, K.n)
    return K.c0 + np.sum(K.ck * z * np.conj(w), axis=-1)


def t_matrix(K: KernelForm, z, w) -> np.ndarray:
    """Mixed logarithmic second derivatives of ``K(z, w)`` (layout in module doc)."""
    z = as_points(z, K.n)
    w = as_points(w, K.n)
    k = kernel_eval(K, z, w)
    if k == 0:
        raise ZeroKernel(f"K(z, w) vanishes at z={z}, w={w}")
    c = K.ck
    # d_{z_col} K = c_col conj(w_col); d_{conj w_row} K = c_row z_row
    return np.diag(c) / k - np.outer(c * z, c * np.conj(w)) / k**2


def metric_at(K: KernelForm, z) -> np.ndarray:
    """Bergman metric ``d dbar log K(z, z)``, positive definite Hermitian."""
    return _hermitian(t_matrix(K, z, z))


def metric_derivatives(K: KernelForm, z):
    """``G``, ``d_k G``, ``dbar_l G`` and ``d_k dbar_l G`` for ``G[i, j] = g_{i jbar}``.

    Returned arrays are indexed ``G[i, j]``, ``dG[k, i, j]``,
    ``dbarG[l, i, j]`` and ``ddbarG[k, l, i, j]``.
    """
    z = as_points(z, K.n)
    c = K.ck
    kz = float(np.real(kernel_eval(K, z, z)))
    a = c * np.conj(z)  # d_i K
    b = c * z  # dbar_j K
    dc = np.diag(c)

    G = dc / kz - np.outer(a, b) / kz**2

    dG = (
        -np.einsum("ij,k->kij", dc, a) / kz**2
        - np.einsum("i,jk->kij", a, dc) / kz**2
        + 2 * np.einsum("i,j,k->kij", a, b, a) / kz**3
    )
    dbarG = (
        -np.einsum("ij,l->lij", dc, b) / kz**2
        - np.einsum("il,j->lij", dc, b) / kz**2
        + 2 * np.einsum("i,j,l->lij", a, b, b) / kz**3
    )
    ab = np.outer(a, b)
    ddbarG = (
        -np.einsum("ij,kl->klij", dc, dc) / kz**2
        + 2 * np.einsum("ij,k,l->klij", dc, a, b) / kz**3
        - np.einsum("il,jk->klij", dc, dc) / kz**2
        + 2 * np.einsum("i,jk,l->klij", a, dc, b) / kz**3
        + 2 * np.einsum("il,j,k->klij", dc, b, a) / kz**3
        + 2 * np.einsum("ij,kl->klij", ab, dc) / kz**3
        - 6 * np.einsum("ij,k,l->klij", ab, a, b) / kz**4
    )
    return G, dG, dbarG, ddbarG


def curvature_tensor(K: KernelForm, z) -> np.ndarray:
    """``R[i, j, k, l] = R_{i jbar k lbar}``."""
    G, dG, dbarG, ddbarG = metric_derivatives(K, z)
    ginv = np.linalg.inv(G)
    second = np.einsum("kip,pq,lqj->ijkl", dG, ginv, dbarG)
    return -np.transpose(ddbarG, (2, 3, 0, 1)) + second


def sectional_curvature(K: KernelForm, z, X) -> float:
    """Holomorphic sectional curvature of the Bergman metric at ``z`` along ``X``."""
    X = as_points(X, K.n)
    G, *_ = metric_derivatives(K, z)
    norm = float(np.real(np.einsum("ij,i,j->", G, X, np.conj(X))))
    if not norm > np.finfo(float).tiny or not np.any(X):
        raise DegenerateDirection("direction has vanishing metric length")
    R = curvature_tensor(K, z)
    Xc = np.conj(X)
    num = np.einsum("ijkl,i,j,k,l->", R, X, Xc, X, Xc)
    return float(np.real(num)) / norm**2


def rescale_to_fubini_study(K: KernelForm) -> np.ndarray:
    """Diagonal map ``w_k = sqrt(c_k / c0) z_k`` taking ``log(K / c0)`` to the FS potential."""
    return np.diag(np.sqrt(K.ck / K.c0)).astype(complex)


def b_function(K: KernelForm, z) -> float:
    """``det T(z, z) / K(z, z)``."""
    det = np.linalg.det(t_matrix(K, z, z))
    return float(np.real(det)) / float(np.real(kernel_eval(K, z, z)))


def b_closed_form(K: KernelForm, z) -> float:
    """``prod_j c_j / K(z, z)**(n + 2)``."""
    return float(np.prod(K.c)) / float(np.real(kernel_eval(K, z, z))) ** (K.n + 2)


def phase_rotation(thetas) -> np.ndarray:
    return np.diag(np.exp(1j * np.asarray(thetas, dtype=float)))


def permutation_map(perm) -> np.ndarray:
    """Permutation matrix sending ``z`` to ``z[perm]``."""
    n = len(perm)
    return np.eye(n, dtype=complex)[list(perm)]


def tangential_permutations(n: int):
    """All permutations of coordinates 1..n-1 as ``n x n`` matrices (``z_n`` fixed)."""
    for perm in permutations(range(n - 1)):
        yield permutation_map((*perm, n - 1))


@dataclass(frozen=True)
class TransformationReport:
    kernel_deviation: float
    t_deviation: float
    b_deviation: float
    kernel_ratio_min: float
    kernel_ratio_max: float
    pairs: int

    @property
    def max_deviation(self) -> float:
        return max(self.kernel_deviation, self.t_deviation, self.b_deviation)

    def holds(self, tol: float = 1e-12) -> bool:
        return self.max_deviation < tol


def _rel(lhs, rhs) -> float:
    scale = max(float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))), np.finfo(float).tiny)
    return float(np.max(np.abs(lhs - rhs))) / scale


def check_transformation_law(K: KernelForm, F, samples) -> TransformationReport:
    """Check the kernel, T-matrix and B-function laws for the linear map ``F``.

    Sample points are paired cyclically (``z_i``, ``z_{i+1}``) for the
    two-point laws; the kernel ratio ``K(z,w) / (conj det J K(Fz,Fw) det J)``
    is reported so a violated law can be told apart from rounding.
    """
    J = np.asarray(F, dtype=complex)
    if J.shape != (K.n, K.n) or abs(np.linalg.det(J)) == 0:
        raise ValueError("F must be an invertible n x n matrix")
    pts = as_points(samples, K.n).reshape(-1, K.n)
    if len(pts) == 0:
        return TransformationReport(0.0, 0.0, 0.0, 1.0, 1.0, 0)
    det = np.linalg.det(J)
    kdev = tdev = bdev = 0.0
    ratios = []
    for i, z in enumerate(pts):
        w = pts[(i + 1) % len(pts)]
        fz, fw = J @ z, J @ w
        lhs = kernel_eval(K, z, w)
        rhs = np.conj(det) * kernel_eval(K, fz, fw) * det
        kdev = max(kdev, _rel(lhs, rhs))
        ratios.append(abs(lhs / rhs))
        t_lhs = t_matrix(K, z, w)
        t_rhs = J.conj().T @ t_matrix(K, fz, fw) @ J
        tdev = max(tdev, _rel(t_lhs, t_rhs))
        bdev = max(bdev, _rel(b_function(K, z), b_function(K, fz)))
    return TransformationReport(kdev, tdev, bdev, min(ratios), max(ratios), len(pts))


@dataclass(frozen=True)
class CartanReport:
    kernel_deviation: float
    t_deviation: float
    min_eigenvalue: float
    samples: int

    def holds(self, tol: float = 1e-13) -> bool:
        return self.kernel_deviation < tol and self.t_deviation < tol and self.min_eigenvalue > 0


def cartan_conditions(K: KernelForm, samples) -> CartanReport:
    """Check ``K(z, 0) = K(0, 0)`` and ``T(z, 0) = T(0, 0)`` (relative deviations)."""
    origin = np.zeros(K.n, dtype=complex)
    k00 = kernel_eval(K, origin, origin)
    t00 = t_matrix(K, origin, origin)
    min_eig = float(np.min(np.linalg.eigvalsh(_hermitian(t00))))
    pts = as_points(samples, K.n).reshape(-1, K.n)
    kdev = tdev = 0.0
    for z in pts:
        kdev = max(kdev, abs(kernel_eval(K, z, origin) - k00) / abs(k00))
        tdev = max(tdev, _rel(t_matrix(K, z, origin), t00))
    return CartanReport(kdev, tdev, min_eig, len(pts))
