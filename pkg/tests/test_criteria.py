import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volterra_hinf import criteria as cr
from volterra_hinf import spaces as sp
from volterra_hinf import weightlib as wl

Z = sp.CoefficientSeries([0, 1])
ZETA3 = 1.2020569031595942


# ---------------------------------------------------------------------------
# trend primitives

def test_series_trend_of_basel_sum():
    t = cr.series_trend(lambda k: -2 * np.log1p(k), 256)
    assert t.verdict == cr.FINITE
    assert t.value == pytest.approx(math.pi ** 2 / 6, rel=1e-12)


def test_series_trend_of_harmonic_sum():
    assert cr.series_trend(lambda k: -np.log1p(k), 256).verdict == cr.DIVERGENT


def test_integral_trend_of_exponential():
    t = cr.integral_trend(lambda y: -y, 64)
    assert t.verdict == cr.FINITE and t.value == pytest.approx(1.0, rel=1e-14)


def test_integral_trend_of_constant_diverges():
    assert cr.integral_trend(lambda y: 0 * y, 64).verdict == cr.DIVERGENT


def test_sup_trend_of_constant_sequence_is_finite():
    assert cr.sup_trend(np.zeros(257)).verdict == cr.FINITE


def test_sup_trend_ignores_rounding_level_increments():
    noise = np.random.default_rng(0).uniform(0, 1e-13, 993)
    assert cr.sup_trend(np.cumsum(noise) * 1e-3 - 4.0).verdict == cr.FINITE


def test_sup_trend_of_linear_growth_diverges():
    assert cr.sup_trend(np.arange(257) * 0.01).verdict == cr.DIVERGENT


def test_conjugate_exponent():
    assert cr.conjugate(3.0) == 1.5
    with pytest.raises(ValueError):
        cr.conjugate(1.0)


def test_inner_sums_of_z():
    k = np.arange(10.0)
    assert np.allclose(cr.inner_sums(Z, k), 1 / (k + 1), rtol=1e-15)


# ---------------------------------------------------------------------------
# 0 < p <= 1

@pytest.mark.parametrize("p", [0.55, 0.7, 0.75, 0.85, 1.0])
def test_critical_power_weight_gives_a_constant_sup(p):
    rep = cr.triviality_p_le_1(p, wl.Standard(2 * p - 2))
    assert rep.verdict == cr.NONTRIVIAL
    assert rep.summary["compact_verdict"] == cr.TRIVIAL_ONLY
    assert rep.summary["sup"] == pytest.approx((2 * p - 1) ** (1 / p), rel=1e-9)


# S(r) behaves like (1-r)^{2-(alpha+2)/p}: unbounded exactly when alpha > 2p - 2
@pytest.mark.parametrize("p, alpha, verdict", [
    (0.75, -0.6, cr.NONTRIVIAL),
    (0.75, -0.4, cr.TRIVIAL_ONLY),
    (1.0, 0.5, cr.TRIVIAL_ONLY),
    (1.0, -0.5, cr.NONTRIVIAL),
    (0.5, 1.0, cr.TRIVIAL_ONLY),
])
def test_p_le_1_threshold(p, alpha, verdict):
    assert cr.triviality_p_le_1(p, wl.Standard(alpha)).verdict == verdict


def test_p_le_1_compact_case():
    rep = cr.triviality_p_le_1(1.0, wl.Standard(-0.5))
    assert rep.summary["compact_verdict"] == cr.NONTRIVIAL


def test_series_form_for_const_at_p1():
    rs = np.array([0.5, 0.9, 0.99])
    sw = cr.series_form_p_le_1(1.0, wl.const(), rs)
    assert np.allclose(sw.ratios, 1 / (1 + rs), rtol=0, atol=1e-12)


def test_regime_errors():
    with pytest.raises(ValueError):
        cr.triviality_p_le_1(1.5, wl.const())
    with pytest.raises(ValueError):
        cr.triviality_p_gt_1(1.0, wl.const())
    with pytest.raises(ValueError):
        cr.series_form_p_le_1(0.5, wl.const(), [1.0])


def test_weights_outside_the_class_are_unsupported():
    rep = cr.triviality_p_le_1(0.75, wl.Exponential(1.0, 1.0))
    assert rep.verdict == cr.UNSUPPORTED and rep.warnings


# ---------------------------------------------------------------------------
# p > 1

@pytest.mark.parametrize("p, alpha, trivial", [
    (2.0, 1.5, False), (2.0, 1.9, False), (2.0, 2.0, True), (2.0, 2.5, True),
    (3.0, 3.5, False), (3.0, 4.5, True), (1.5, 0.5, False), (1.5, 1.5, True),
])
def test_p_gt_1_threshold_at_alpha_2p_minus_2(p, alpha, trivial):
    rep = cr.triviality_p_gt_1(p, wl.Standard(alpha))
    assert (rep.verdict == cr.TRIVIAL_ONLY) is trivial
    assert rep.summary["integral_verdict"] == rep.summary["series_verdict"]


@pytest.mark.parametrize("p, alpha, trivial", [(2.0, -0.5, False), (2.0, 0.0, True), (3.0, 0.5, False), (3.0, 1.5, True)])
def test_bergman_threshold_at_alpha_p_minus_2(p, alpha, trivial):
    assert (cr.bergman_triviality(p, wl.Standard(alpha)).verdict == cr.TRIVIAL_ONLY) is trivial


def test_triviality_series_for_const_p2():
    # 1 / ((k+1)^4 w_k), w_k = 1/(k+1): the series is zeta(3)
    assert cr.triviality_p_gt_1(2.0, wl.const()).summary["series_value"] == pytest.approx(ZETA3, rel=1e-12)


def test_counterexample_sweep():
    got = [(r.summary["theorem_verdict"], r.summary["lower_verdict"]) for r in cr.counterexample_sweep()]
    assert got == [(cr.FINITE, cr.FINITE), (cr.FINITE, cr.DIVERGENT), (cr.FINITE, cr.DIVERGENT),
                   (cr.DIVERGENT, cr.DIVERGENT)]


# ---------------------------------------------------------------------------
# nonnegative symbols

@pytest.mark.parametrize("p, w, verdict, value", [
    (2.0, wl.const(), cr.COMPACT, ZETA3),
    (3.0, wl.Standard(1.0), cr.COMPACT, 1.8134525701032103),
    (2.0, wl.Standard(3.0, normalized=True), cr.UNBOUNDED, None),
])
def test_bounded_tg_series(p, w, verdict, value):
    rep = cr.bounded_tg(p, w, Z)
    assert rep.verdict == verdict
    if value is not None:
        assert rep.summary["value"] == pytest.approx(value, rel=1e-9)


@pytest.mark.parametrize("name, verdict", [("const", cr.UNBOUNDED), ("std-0.5", cr.NOT_COMPACT), ("loglog", cr.COMPACT)])
def test_bounded_tg_p_three_quarters(name, verdict):
    assert cr.bounded_tg(0.75, wl.registry()[name], Z).verdict == verdict


def test_bounded_tg_p1_const():
    rep = cr.bounded_tg(1.0, wl.const(), Z)
    assert rep.summary["bounded"] == cr.BOUNDED
    assert rep.verdict in (cr.BOUNDED, cr.COMPACT, cr.NOT_COMPACT)


def test_constant_symbol_is_compact():
    rep = cr.bounded_tg(2.0, wl.const(), sp.CoefficientSeries([5.0]))
    assert rep.verdict == cr.COMPACT and rep.summary["value"] == 0.0


def test_symbol_must_be_nonnegative():
    with pytest.raises(ValueError):
        cr.bounded_tg(0.75, wl.const(), sp.CoefficientSeries([0, -1]))


def test_xspaces_series_for_integration_operator():
    # (k+1)^{p'-2} / w_k / (k+1)^2 at p = 2 is the harmonic series
    assert cr.bounded_tg_xspaces(2.0, wl.const(), Z).verdict == cr.UNBOUNDED


def test_g_equals_z_reduction_is_termwise():
    k = np.arange(4096)
    for p in (1.5, 2.0, 3.0):
        a = cr.bounded_tg_log_terms(p, wl.Standard(1.0), Z, k)
        b = cr.triviality_log_terms(p, wl.Standard(1.0), k)
        assert np.max(np.abs(np.expm1(a - b))) <= 1e-14


@settings(max_examples=10, deadline=None)
@given(c=st.lists(st.floats(0.0, 5.0), min_size=1, max_size=6), s=st.floats(0.1, 10.0))
def test_symbol_scaling(c, s):
    # the p > 1 series is homogeneous of degree p' in g
    g = sp.CoefficientSeries([0.0] + c)
    if g.degree == 0:
        return
    k = np.arange(64)
    a = cr.bounded_tg_log_terms(2.0, wl.const(), g * s, k)
    b = cr.bounded_tg_log_terms(2.0, wl.const(), g, k)
    assert np.allclose(a - b, 2 * math.log(s), atol=1e-12)


def test_report_serializes():
    d = cr.triviality_p_gt_1(2.0, wl.const()).to_dict()
    assert d["verdict"] == cr.NONTRIVIAL and d["params"]["p"] == 2.0


def test_short_ladders_are_rejected():
    with pytest.raises(ValueError, match="too short"):
        cr.triviality_p_le_1(0.75, wl.const(), depth=cr.MIN_DEPTH - 1)
    assert cr.triviality_p_le_1(0.75, wl.const(), depth=cr.MIN_DEPTH).verdict == cr.TRIVIAL_ONLY
