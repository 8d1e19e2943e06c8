import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volterra_hinf import spaces as sp
from volterra_hinf import volterra as vo
from volterra_hinf import weightlib as wl

Z = sp.CoefficientSeries([0, 1])


def test_tg_of_one_is_g_minus_g0():
    g = sp.CoefficientSeries([5, 1, 2, 3])
    assert vo.tg_series(sp.CoefficientSeries([1.0]), g) == g - sp.CoefficientSeries([5.0])


def test_tz_is_integration():
    # T_z f = int_0^z f: z^n -> z^{n+1}/(n+1)
    out = vo.tg_series(sp.CoefficientSeries.monomial(3), Z)
    assert out == sp.CoefficientSeries([0, 0, 0, 0, 0.25])


@pytest.mark.parametrize("z", [0.0, 0.5, 0.3 - 0.8j, np.exp(2j)])
def test_backends_agree(z):
    f, g = sp.random_polynomials(2, 20, seed=9)
    a = vo.apply_tg(f, g, z)
    b = vo.apply_tg(f, g, z, backend="quadrature")
    assert abs(a - b) <= 1e-12 * (1 + abs(a))


def test_vectorized_evaluation():
    f, g = sp.random_polynomials(2, 10, seed=1)
    zs = np.array([0.1, 0.2j, -0.5])
    assert np.allclose(vo.apply_tg(f, g, zs), [vo.apply_tg(f, g, z) for z in zs])


def test_evaluation_outside_the_disc():
    with pytest.raises(ValueError):
        vo.apply_tg(Z, Z, 1.5)


def test_unknown_backend():
    with pytest.raises(ValueError):
        vo.apply_tg(Z, Z, 0.5, backend="nosuch")


@pytest.mark.parametrize("f, expected", [
    (sp.CoefficientSeries([1, 1]), 2.0),
    (sp.CoefficientSeries([0, 0, 3j]), 3.0),
    (sp.CoefficientSeries([1, 0, -1]), 2.0),
])
def test_hinf_norm(f, expected):
    assert vo.hinf_norm(f) == pytest.approx(expected, rel=1e-12)


def test_monomial_lower_bound_for_const_p2():
    # T_z z^n = z^{n+1}/(n+1), ||z^n||_{D^2} = sqrt(n) (n >= 1), ||1|| = 1:
    # the ratios are 1 (n = 0) and 1/((n+1) sqrt(n)) otherwise
    fam = [(f"monomial:{n}", sp.CoefficientSeries.monomial(n)) for n in range(6)]
    est = vo.empirical_opnorm(2.0, wl.const(), Z, family=fam)
    vals = dict(est.members)
    assert vals["monomial:0"] == pytest.approx(1.0, rel=1e-12)
    assert vals["monomial:3"] == pytest.approx(1 / (4 * math.sqrt(3)), rel=1e-12)
    assert est.lower_bound == pytest.approx(1.0) and est.label == vo.LOWER_BOUND


@pytest.mark.parametrize("source", ["dpw", "apw", "hlpw"])
def test_monomial_closed_forms_match_the_norms(source):
    w, p = wl.Standard(1.0), 1.5
    ns = np.arange(8)
    closed = vo._monomial_norms(ns, p, w, source)
    direct = [vo._source_norm(sp.CoefficientSeries.monomial(int(n)), p, w, source) for n in ns]
    assert np.allclose(closed, direct, rtol=1e-9)


def test_constant_symbol_gives_zero():
    est = vo.empirical_opnorm(2.0, wl.const(), sp.CoefficientSeries([4.0]),
                              family=vo.default_family(0, 4, 2, 4))
    assert est.lower_bound == 0.0


def test_empty_family():
    with pytest.raises(ValueError):
        vo.empirical_opnorm(2.0, wl.const(), Z, family=[])


def test_default_family_composition():
    fam = vo.default_family(seed=0, n_monomials=8, n_random=3, random_degree=5, kernel_weight=wl.const(),
                            kernel_degree=16, kernel_radii=2)
    names = [n for n, _ in fam]
    assert names[:2] == ["monomial:0", "monomial:1"] and len(fam) == 9 + 3 + 2
    assert names[-1] == "kernel:1-2^-2"


def test_consistency_report_const_p2():
    fam = vo.default_family(seed=0, n_monomials=32, n_random=5, random_degree=16, kernel_weight=wl.const(),
                            kernel_degree=64, kernel_radii=4)
    rep = vo.consistency_report(2.0, wl.const(), Z, family=fam, K=128)
    # scale = zeta(3)^{1/2}
    assert rep["criterion_scale"] == pytest.approx(math.sqrt(1.2020569031595942), rel=1e-9)
    assert rep["within_sanity_band"] is True
    assert rep["kernel_surrogate"] > 0


def test_consistency_report_skips_unbounded_cases():
    fam = vo.default_family(seed=0, n_monomials=8, n_random=2, random_degree=8)
    rep = vo.consistency_report(2.0, wl.Standard(3.0), Z, family=fam, with_kernel=False)
    assert rep["within_sanity_band"] is None and rep["warnings"]


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10 ** 6), a=st.floats(-3, 3), b=st.floats(-3, 3))
def test_tg_is_linear_in_f_and_g(seed, a, b):
    f1, f2, g, h = sp.random_polynomials(4, 10, seed=seed)
    lhs = vo.tg_series(f1 * a + f2 * b, g)
    rhs = vo.tg_series(f1, g) * a + vo.tg_series(f2, g) * b
    n = max(len(lhs), len(rhs))
    assert np.allclose(np.pad(lhs.c, (0, n - len(lhs))), np.pad(rhs.c, (0, n - len(rhs))), atol=1e-10)
    s1, s2 = vo.tg_series(f1, g + h), vo.tg_series(f1, g) + vo.tg_series(f1, h)
    n = max(len(s1), len(s2))
    assert np.allclose(np.pad(s1.c, (0, n - len(s1))), np.pad(s2.c, (0, n - len(s2))), atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_tg_derivative_is_f_times_g_prime(seed):
    f, g = sp.random_polynomials(2, 12, seed=seed)
    lhs = vo.tg_series(f, g).derivative()
    rhs = f * g.derivative()
    n = max(len(lhs), len(rhs))
    assert np.allclose(np.pad(lhs.c, (0, n - len(lhs))), np.pad(rhs.c, (0, n - len(rhs))), atol=1e-10)
    assert vo.apply_tg(f, g, 0.0) == 0
