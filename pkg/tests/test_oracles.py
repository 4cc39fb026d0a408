import math

import numpy as np
import pytest
from conftest import random_complex

from reinhardt.domain import DomainSpec
from reinhardt.geometry import t_matrix
from reinhardt.oracles import (
    fd_log_kernel_hessian,
    fd_sectional_curvature,
    fs_reference_curvature,
    mc_moment,
)
from reinhardt.quadrature import integrate_half_line
from reinhardt.space import moment_integrand, truncated_norm_sq


def test_mc_volume_matches_quadrature():
    # D(1.2) in C^3: the reduced volume integrand is f_0(rho)^2
    spec = DomainSpec(3, "6/5")
    quad = math.pi**3 * integrate_half_line(moment_integrand(spec, (0, 0, 0))).value
    # beyond |z_3|^2 = 2000 lies about 1e-3 of the volume (tail ~ rho^-1.4)
    est = mc_moment(spec, (0, 0, 0), 2000.0, samples=1_000_000, seed=5)
    assert est.value == pytest.approx(quad, rel=0.02)


def test_mc_std_error_scaling():
    spec = DomainSpec(2, "5/2")
    small = mc_moment(spec, (0, 1), 20.0, samples=250_000, seed=1)
    large = mc_moment(spec, (0, 1), 20.0, samples=1_000_000, seed=1)
    assert large.std_error / small.std_error == pytest.approx(0.5, rel=0.1)
    assert large.samples == 1_000_000


def test_mc_determinism_and_seeds():
    spec = DomainSpec(2, "5/2")
    a = mc_moment(spec, (1, 0), 20.0, samples=300_000, seed=42)
    b = mc_moment(spec, (1, 0), 20.0, samples=300_000, seed=42)
    assert a == b
    c = mc_moment(spec, (1, 0), 20.0, samples=300_000, seed=43)
    assert c.value != a.value


def test_mc_coverage_over_seeds():
    spec = DomainSpec(3, "5/4")
    ref = truncated_norm_sq(spec, (0, 0, 1), 10.0).value
    hits = sum(mc_moment(spec, (0, 0, 1), 10.0, samples=50_000, seed=s).within(ref) for s in range(20))
    assert hits >= 18


def test_mc_validation():
    with pytest.raises(ValueError):
        mc_moment(DomainSpec(2, 1), (0, 0), 10.0, samples=1)


def test_fd_hessian_fixtures():
    z, w = np.array([0.3 + 0.1j, -0.2j]), np.array([0.1, 0.4 + 0.2j])
    const = fd_log_kernel_hessian(lambda z, w: 2.5 + 0 * z[0], z, w)
    np.testing.assert_allclose(const, 0, atol=1e-12)
    expo = fd_log_kernel_hessian(lambda z, w: np.exp(z[0] * np.conj(w[0])), z, w)
    np.testing.assert_allclose(expo, [[1, 0], [0, 0]], atol=1e-8)


def test_fd_hessian_matches_analytic(window_kernels, rng):
    K = window_kernels[(2, "5/2")]
    z = 0.5 * random_complex(rng, 2)
    exact = t_matrix(K, z, z)
    assert np.max(np.abs(fd_log_kernel_hessian(K, z, z) - exact)) <= 1e-6 * np.max(np.abs(exact))
    # a callable giving the same kernel takes the same path
    c = K.c
    approx = fd_log_kernel_hessian(lambda z, w: c[0] + np.sum(c[1:] * z * np.conj(w)), z, z)
    np.testing.assert_allclose(approx, fd_log_kernel_hessian(K, z, z), rtol=1e-15)


def test_fd_curvature_fixtures(rng):
    disk = lambda z: -2 * np.log(1 - abs(z[0]) ** 2)  # noqa: E731
    assert fd_sectional_curvature(disk, [0.0], [1.0]) == pytest.approx(-1.0, abs=1e-5)
    fs = lambda z: np.log(1 + np.sum(np.abs(z) ** 2))  # noqa: E731
    z, X = 0.4 * random_complex(rng, 2), random_complex(rng, 2)
    assert fd_sectional_curvature(fs, z, X) == pytest.approx(2.0, abs=1e-5)
    with pytest.raises(ValueError):
        fd_sectional_curvature(fs, z, [0, 0])


def test_fd_curvature_of_domain_kernel(window_kernels, rng):
    K = window_kernels[(3, "5/4")]
    phi = lambda z: np.log(K.c0 + np.sum(K.ck * np.abs(z) ** 2))  # noqa: E731
    z, X = 0.5 * random_complex(rng, 3), random_complex(rng, 3)
    assert fd_sectional_curvature(phi, z, X) == pytest.approx(2.0, abs=1e-4)


def test_fs_reference_curvature(rng):
    assert fs_reference_curvature([0, 0], [1, 0]) == pytest.approx(2.0, abs=1e-15)
    assert fs_reference_curvature([0], [1]) == pytest.approx(2.0, abs=1e-15)
    for n in (1, 2, 5):
        z, X = random_complex(rng, n), random_complex(rng, n)
        assert fs_reference_curvature(z, X) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ValueError):
        fs_reference_curvature([0.1, 0.2], [0, 0])


def test_fd_step_is_not_roundoff_limited(window_kernels):
    # the default step sits near the optimum: halving or doubling it changes little
    K = window_kernels[(2, "11/4")]
    z = np.array([0.7 + 0.2j, 0.5 - 0.4j])
    exact = t_matrix(K, z, z)
    errs = [np.max(np.abs(fd_log_kernel_hessian(K, z, z, h) - exact)) / np.max(np.abs(exact)) for h in (5e-4, 1e-3, 2e-3)]
    assert max(errs) < 1e-6
