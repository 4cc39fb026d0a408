import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from reinhardt.domain import DomainSpec
from reinhardt.quadrature import (
    NonFiniteIntegrand,
    PanelBudgetExhausted,
    QuadratureConfig,
    Verdict,
    integrate_half_line,
    integrate_interval,
    probe_divergence,
)
from reinhardt.space import moment_integrand

CFG = QuadratureConfig()


def test_exponential():
    out = integrate_half_line(lambda x: np.exp(-x))
    assert out.verdict is Verdict.CONVERGED
    assert out.value == pytest.approx(1.0, rel=CFG.rel_tol)


def test_power_law_tail():
    out = integrate_half_line(lambda x: (1 + x) ** -2.5)
    assert out.value == pytest.approx(2 / 3, rel=CFG.rel_tol)


def test_converged_error_meets_target():
    for f in (lambda x: np.exp(-x), lambda x: (1 + x) ** -1.5, lambda x: 1 / (1 + x * x)):
        out = integrate_half_line(f)
        assert out.converged
        assert out.error_estimate <= max(CFG.rel_tol * abs(out.value), CFG.abs_tol)


def test_arctan_against_closed_form():
    assert integrate_half_line(lambda x: 1 / (1 + x * x)).value == pytest.approx(math.pi / 2, rel=1e-10)


def test_sign_changing_integrand():
    # f >= 0 is not assumed: int_0^inf e^{-x} cos x dx = 1/2
    out = integrate_half_line(lambda x: np.exp(-x) * np.cos(x))
    assert out.value == pytest.approx(0.5, rel=1e-10)


def test_finite_interval_with_kink():
    out = integrate_interval(lambda x: np.abs(x - 0.3), 0.0, 1.0, breakpoints=(0.3,))
    assert out.value == pytest.approx(0.5 * (0.3**2 + 0.7**2), rel=1e-12)
    assert out.panels_used == 2


def test_kink_without_breakpoint_still_converges():
    out = integrate_interval(lambda x: np.abs(x - 0.3), 0.0, 1.0)
    assert out.value == pytest.approx(0.29, rel=1e-10)


def test_budget_exhausted_for_divergent_integrand():
    with pytest.raises((PanelBudgetExhausted, NonFiniteIntegrand)) as info:
        integrate_half_line(lambda x: 1.0 + 0 * x, QuadratureConfig(max_panels=200))
    if isinstance(info.value, PanelBudgetExhausted):
        assert info.value.outcome.verdict is Verdict.INCONCLUSIVE


def test_panel_budget_carries_outcome():
    with pytest.raises(PanelBudgetExhausted) as info:
        integrate_half_line(lambda x: (1 + x) ** -1.5, QuadratureConfig(max_panels=3))
    assert info.value.outcome.verdict is Verdict.INCONCLUSIVE
    assert info.value.outcome.panels_used <= 3


def test_non_finite_integrand():
    with pytest.raises(NonFiniteIntegrand):
        integrate_half_line(lambda x: np.where(x > 1, np.nan, 1.0))


def test_deterministic():
    f = lambda x: np.exp(-x) * (1 + np.sin(x) ** 2)
    assert integrate_half_line(f) == integrate_half_line(f)


@pytest.mark.parametrize(
    "kwargs",
    [dict(rel_tol=0), dict(abs_tol=-1), dict(max_panels=0), dict(tail_cut=0), dict(growth_window=2)],
)
def test_config_invariants(kwargs):
    with pytest.raises(ValueError):
        QuadratureConfig(**kwargs)


# -- algebraic properties ------------------------------------------------------

decays = st.floats(min_value=1.3, max_value=4.0)
scales = st.floats(min_value=0.1, max_value=10.0)


@settings(max_examples=25, deadline=None)
@given(s=decays, t=decays, lam=scales)
def test_additivity_and_scaling(s, t, lam):
    f = lambda x: (1 + x) ** -s
    g = lambda x: lam * np.exp(-x / lam)
    a, b = integrate_half_line(f), integrate_half_line(g)
    both = integrate_half_line(lambda x: f(x) + g(x))
    assert abs(both.value - a.value - b.value) <= both.error_estimate + a.error_estimate + b.error_estimate
    scaled = integrate_half_line(lambda x: lam * f(x))
    assert scaled.value == pytest.approx(lam * a.value, rel=10 * CFG.rel_tol)


@settings(max_examples=15, deadline=None)
@given(s=decays)
def test_halving_tolerance_is_self_consistent(s):
    f = lambda x: (1 + x) ** -s * (1 + 1 / (2 + x))
    coarse = integrate_half_line(f, QuadratureConfig(rel_tol=1e-8))
    fine = integrate_half_line(f, QuadratureConfig(rel_tol=5e-9))
    assert abs(coarse.value - fine.value) <= max(coarse.error_estimate, fine.error_estimate)


# -- divergence probe ----------------------------------------------------------


def test_probe_constant_grows_linearly():
    res = probe_divergence(lambda x: np.ones_like(x))
    assert res.verdict is Verdict.DIVERGES
    assert res.exponent == pytest.approx(1.0, abs=1e-9)


def test_probe_inverse_square_converges():
    assert probe_divergence(lambda x: (1 + x) ** -2.0).verdict is Verdict.CONVERGED


@pytest.mark.parametrize("s", [-2.5, -2.0, -1.5, -1.1, -1.0, -0.9, -0.5, 0.0, 0.5])
def test_probe_power_family(s):
    res = probe_divergence(lambda x: (1 + x) ** s)
    assert res.diverges == (s >= -1)
    if s > -1:
        assert abs(res.exponent - (s + 1)) < 0.1


def test_probe_compact_support_converges():
    res = probe_divergence(lambda x: np.where(x < 10, 1.0, 0.0), breakpoints=(10.0,))
    assert res.verdict is Verdict.CONVERGED


def test_probe_exponent_matches_independent_partial_integrals():
    # n=2, a=5/2, p=(1,1): tail power |p| - a(n-1) + 1 = 0.5
    spec = DomainSpec(2, "5/2")
    f = moment_integrand(spec, (1, 1))
    res = probe_divergence(f)
    assert res.verdict is Verdict.DIVERGES
    radii = np.array(res.radii)
    # independent partial integrals with QUADPACK
    partial = np.array([quad(lambda r: float(f(r)), 0, R, limit=500, points=[0.5])[0] for R in radii])
    np.testing.assert_allclose(res.partial_integrals, partial, rtol=1e-8)
    slope = np.polyfit(np.log(radii[1:]), np.log(np.diff(partial)), 1)[0]
    assert res.exponent == pytest.approx(slope, abs=1e-6)
    assert abs(res.exponent - 0.5) < 0.1
