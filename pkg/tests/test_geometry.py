import itertools

import numpy as np
import pytest
from conftest import random_complex
from hypothesis import given, settings
from hypothesis import strategies as st

from reinhardt import geometry as geo
from reinhardt.domain import DomainSpec, sample_points
from reinhardt.oracles import fd_log_kernel_hessian, wirtinger_fd


def _points(n, a, count=20, seed=0):
    return sample_points(DomainSpec(n, a), count, seed=seed)


def test_kernel_form_validation():
    with pytest.raises(ValueError):
        geo.KernelForm(np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        geo.KernelForm(np.array([1.0]))
    K = geo.KernelForm.fubini_study(3)
    assert K.n == 3 and K.c0 == 1.0


def test_kernel_examples(window_kernels, rng):
    K = window_kernels[(3, "5/4")]
    origin = np.zeros(3)
    assert geo.kernel_eval(K, origin, origin) == K.c0
    z = random_complex(rng, 3)
    assert geo.kernel_eval(K, z, origin) == K.c0
    w = random_complex(rng, 3)
    assert geo.kernel_eval(K, z, w) == pytest.approx(np.conj(geo.kernel_eval(K, w, z)), rel=1e-15)


def test_metric_at_origin(window_kernels):
    for K in window_kernels.values():
        np.testing.assert_allclose(geo.metric_at(K, np.zeros(K.n)), np.diag(K.ck / K.c0), rtol=1e-15)
    assert geo.metric_at(geo.KernelForm.fubini_study(1), [0]) == pytest.approx(np.eye(1))


def test_metric_is_positive_hermitian(window_kernels):
    for (n, a), K in window_kernels.items():
        for z in _points(n, a):
            g = geo.metric_at(K, z)
            np.testing.assert_array_equal(g, g.conj().T)
            assert np.min(np.linalg.eigvalsh(g)) > 0


def test_t_matrix_diagonal_and_cartan(window_kernels):
    for (n, a), K in window_kernels.items():
        t00 = geo.t_matrix(K, np.zeros(n), np.zeros(n))
        for z in _points(n, a, 10):
            np.testing.assert_allclose(geo.t_matrix(K, z, z), geo.metric_at(K, z), rtol=0, atol=1e-14 * np.abs(t00).max())
            np.testing.assert_allclose(geo.t_matrix(K, z, np.zeros(n)), t00, rtol=1e-15)


def test_t_matrix_against_finite_differences(window_kernels, rng):
    for (n, a), K in window_kernels.items():
        for z in _points(n, a, 5, seed=4):
            for w in (z, z + 0.1 * random_complex(rng, n)):
                exact = geo.t_matrix(K, z, w)
                approx = fd_log_kernel_hessian(K, z, w)
                assert np.max(np.abs(exact - approx)) <= 1e-6 * np.max(np.abs(exact))


def test_zero_kernel():
    K = geo.KernelForm(np.array([1.0, 1.0]))
    with pytest.raises(geo.ZeroKernel):
        geo.t_matrix(K, [1.0], [-1.0])


def test_metric_derivatives_against_finite_differences(window_kernels):
    K = window_kernels[(3, "5/4")]
    z = _points(3, "5/4", 1, seed=9)[0]

    def potential(x):
        return np.log(np.real(geo.kernel_eval(K, x, x)))

    G, dG, dbarG, ddbarG = geo.metric_derivatives(K, z)
    for i, j in itertools.product(range(3), repeat=2):
        assert G[i, j] == pytest.approx(wirtinger_fd(potential, z, [(i, False), (j, True)], 1e-3), abs=1e-7)
        for k in range(3):
            fd = wirtinger_fd(potential, z, [(k, False), (i, False), (j, True)], 1e-2)
            assert dG[k, i, j] == pytest.approx(fd, abs=1e-6)
            fd = wirtinger_fd(potential, z, [(k, True), (i, False), (j, True)], 1e-2)
            assert dbarG[k, i, j] == pytest.approx(fd, abs=1e-6)
        for k, l in itertools.product(range(3), repeat=2):
            fd = wirtinger_fd(potential, z, [(k, False), (l, True), (i, False), (j, True)], 1e-2)
            assert ddbarG[k, l, i, j] == pytest.approx(fd, abs=1e-5)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_fubini_study_curvature_is_two(n, seed):
    rng = np.random.default_rng(seed)
    K = geo.KernelForm.fubini_study(n)
    z, X = random_complex(rng, n), random_complex(rng, n)
    assert geo.sectional_curvature(K, z, X) == pytest.approx(2.0, abs=1e-12)


def test_domain_curvature_is_two(window_kernels, rng):
    for (n, a), K in window_kernels.items():
        for z in _points(n, a, 5, seed=2):
            assert geo.sectional_curvature(K, z, random_complex(rng, n)) == pytest.approx(2.0, abs=1e-8)


def test_curvature_scale_invariance(window_kernels, rng):
    K = window_kernels[(2, "11/4")]
    z, X = _points(2, "11/4", 1)[0], random_complex(rng, 2)
    assert geo.sectional_curvature(K, z, 3j * X) == pytest.approx(geo.sectional_curvature(K, z, X), rel=1e-14)


def test_degenerate_direction(window_kernels):
    K = window_kernels[(2, "5/2")]
    with pytest.raises(geo.DegenerateDirection):
        geo.sectional_curvature(K, [0.1, 0.2], [0, 0])


def test_rescale_pulls_back_fubini_study(window_kernels, rng):
    assert np.array_equal(geo.rescale_to_fubini_study(geo.KernelForm.fubini_study(3)), np.eye(3))
    fs = lambda n: geo.KernelForm.fubini_study(n)  # noqa: E731
    for (n, a), K in window_kernels.items():
        A = geo.rescale_to_fubini_study(K)
        np.testing.assert_allclose(np.diag(A) ** 2, K.ck / K.c0, rtol=1e-15)
        for z in _points(n, a, 5):
            lhs = geo.metric_at(K, z)
            rhs = A.conj().T @ geo.metric_at(fs(n), A @ z) @ A
            assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(lhs))


def test_b_function_examples(window_kernels):
    for (n, a), K in window_kernels.items():
        assert geo.b_function(K, np.zeros(n)) == pytest.approx(np.prod(K.ck) / K.c0 ** (n + 1), rel=1e-13)
        for z in _points(n, a):
            assert geo.b_function(K, z) == pytest.approx(geo.b_closed_form(K, z), rel=1e-10)
            assert geo.b_function(K, z) < geo.b_function(K, np.zeros(n))


def test_transformation_laws(window_kernels, rng):
    for (n, a), K in window_kernels.items():
        pts = _points(n, a)
        rot = geo.phase_rotation(rng.uniform(0, 2 * np.pi, n))
        assert geo.check_transformation_law(K, rot, pts).holds(1e-12)
        for F in geo.tangential_permutations(n):
            assert geo.check_transformation_law(K, F, pts).holds(1e-12)
        scaled = geo.check_transformation_law(K, 2 * np.eye(n), pts)
        assert not scaled.holds(1e-12) and scaled.kernel_ratio_max < 0.9


def test_tangential_permutations_count():
    maps = list(geo.tangential_permutations(4))
    assert len(maps) == 6
    assert all(F[3, 3] == 1 for F in maps)
    np.testing.assert_array_equal(geo.permutation_map((1, 0)) @ np.array([1, 2]), [2, 1])


def test_transformation_law_validation(window_kernels):
    K = window_kernels[(2, "5/2")]
    with pytest.raises(ValueError):
        geo.check_transformation_law(K, np.zeros((2, 2)), [[0, 0]])
    assert geo.check_transformation_law(K, np.eye(2), np.empty((0, 2))).pairs == 0


def test_cartan_conditions(window_kernels):
    for (n, a), K in window_kernels.items():
        rep = geo.cartan_conditions(K, _points(n, a, 50))
        assert rep.holds(1e-13) and rep.samples == 50
        assert rep.min_eigenvalue == pytest.approx(np.min(K.ck) / K.c0, rel=1e-14)
    empty = geo.cartan_conditions(window_kernels[(2, "5/2")], np.empty((0, 2)))
    assert empty.holds() and empty.samples == 0

