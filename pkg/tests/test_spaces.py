import math

import numpy as np
import pytest
from scipy.special import ellipe
from hypothesis import given, settings
from hypothesis import strategies as st

from volterra_hinf import spaces as sp
from volterra_hinf import weightlib as wl

Z = sp.CoefficientSeries([0, 1])
CONST = wl.const()


def poly(*c):
    return sp.CoefficientSeries(c)


# ---------------------------------------------------------------------------
# frozen closed-form values

@pytest.mark.parametrize("f, p, expected", [
    (sp.CoefficientSeries.monomial(5), 1.0, 1.0),
    (sp.CoefficientSeries.monomial(5), 3.0, 1.0),
    (poly(1, 1), 2.0, math.sqrt(2)),
    (poly(3, 0, 4), 2.0, 5.0),
    # mean of |a + e^{it}| = (2/pi)(a+1) E(m), m = 4a/(a+1)^2, complete elliptic integral
    (poly(2, 1), 1.0, 6 / math.pi * ellipe(8 / 9)),
])
def test_hardy_norm_values(f, p, expected):
    assert sp.norm_hp(f, p).value == pytest.approx(expected, rel=1e-12)


def test_hardy_norm_with_a_zero_on_the_circle():
    # mean of |1 + e^{it}| = mean of 2|cos(t/2)| = 4/pi; the kink limits the rule to about 1e-11
    v = sp.norm_hp(poly(1, 1), 1.0)
    assert v.value == pytest.approx(4 / math.pi, rel=1e-10)
    assert v.warnings and v.error < 1e-9


@pytest.mark.parametrize("n", [0, 1, 4, 30])
def test_bergman_norm_of_monomials_const_weight(n):
    # ||z^n||^2 = 2 int_0^1 r^{2n+1} dr = 1/(n+1)
    assert sp.norm_apw(sp.CoefficientSeries.monomial(n), 2, CONST).value ** 2 == pytest.approx(1 / (n + 1), rel=1e-10)


def test_dirichlet_norm_of_z_const_weight():
    # ||z||_{D^2}^2 = ||1||_{A^2}^2 + 0 = 2 w_1 = 1
    assert sp.norm_dpw(Z, 2, CONST).value == pytest.approx(1.0, rel=1e-12)


def test_zygmund_norm_of_z_cubed():
    assert sp.norm_zygmund(sp.CoefficientSeries.monomial(3)).value == pytest.approx(4 / math.sqrt(3), rel=1e-10)


def test_bloch_norm_of_z():
    assert sp.norm_bloch(Z).value == pytest.approx(1.0, rel=1e-10)


def test_bmoa_of_z_and_constants():
    assert sp.norm_bmoa(Z).value == pytest.approx(1.0, rel=1e-10)
    c = sp.norm_bmoa(poly(2 - 1j))
    assert c.params["seminorm"] == 0.0 and c.value == pytest.approx(abs(2 - 1j))


def test_bmoa_inf_of_z_const_weight():
    # sup_r (1 - r) r = 1/4
    assert sp.norm_bmoa_inf(Z, CONST).value == pytest.approx(0.25, rel=1e-8)


def test_bmoa_prime_inf_of_z_squared():
    # (z^2)' = 2z, so the value is 2 * 1/4
    assert sp.norm_bmoa_prime_inf(sp.CoefficientSeries.monomial(2), CONST).value == pytest.approx(0.5, rel=1e-8)


@pytest.mark.parametrize("kind", ["D2", "A2", "HL"])
def test_pairing_orthogonality(kind):
    assert sp.pairing(sp.CoefficientSeries.monomial(2), sp.CoefficientSeries.monomial(3), kind, CONST) == 0


def test_pairing_of_z_with_itself():
    # <z, z>_{D^2_w} = 2 w_1
    w = wl.Standard(1.0)
    assert sp.pairing(Z, Z, "D2", w).real == pytest.approx(2 * wl.moment(w, 1.0), rel=1e-12)


@pytest.mark.parametrize("n, r", [(0, 0.5), (3, 0.7), (10, 0.95)])
def test_growth_means_of_monomials(n, r):
    m1, m2, minf = sp.growth_means(sp.CoefficientSeries.monomial(n), r)
    assert m1 == pytest.approx(r ** n, rel=1e-12)
    assert m2 == pytest.approx(r ** n, rel=1e-12)
    assert minf == pytest.approx(r ** n, rel=1e-12)


# ---------------------------------------------------------------------------
# identities and inequalities on corpora

@pytest.mark.parametrize("name", ["const", "std1", "std-0.5", "logpow"])
def test_p2_collapse(name):
    w = wl.registry()[name]
    for f in sp.random_polynomials(20, 24, seed=3):
        a = sp.norm_apw(f, 2, w).value ** 2
        assert a == pytest.approx(2 * sp.norm_hlpw(f, 2, w).value ** 2, rel=1e-8)


def test_holder_bound_for_the_dirichlet_pairing():
    w, p = wl.Standard(1.0), 3.0
    q = p / (p - 1)
    polys = sp.random_polynomials(20, 12, seed=5)
    for f, g in zip(polys, polys[1:]):
        lhs = abs(sp.pairing(f, g, "D2", w))
        df, dg = f.derivative(), g.derivative()
        a = sp.norm_apw(df, p, w).value if df.degree or df.c[0] else 0.0
        b = sp.norm_apw(dg, q, w).value if dg.degree or dg.c[0] else 0.0
        assert lhs <= a * b + abs(f.c[0] * g.c[0]) + 1e-12


@pytest.mark.parametrize("r", [0.5, 0.9])
def test_pommerenke_inequality(r):
    for f in sp.random_polynomials(20, 20, seed=11):
        lhs, rhs = sp.pommerenke_sides(f, r)
        assert lhs <= rhs


@pytest.mark.parametrize("p", [1.0, 3.0])
def test_monomial_separation_trend(p):
    # A/HL for z^n is 2^{1/p} (n+1)^{(2-p)/p}: growing for p < 2, decaying for p > 2
    ns = [1, 4, 16, 64, 256, 1024]
    ratios = [sp.norm_apw(sp.CoefficientSeries.monomial(n), p, CONST).value
              / sp.norm_hlpw(sp.CoefficientSeries.monomial(n), p, CONST).value for n in ns]
    diffs = np.diff(ratios)
    assert np.all(diffs > 0) if p < 2 else np.all(diffs < 0)
    assert ratios[-1] == pytest.approx(2 ** (1 / p) * 1025 ** ((2 - p) / p), rel=1e-8)


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
@pytest.mark.parametrize("name", ["const", "std1"])
def test_decreasing_coefficients_keep_the_norms_comparable(p, name):
    w = wl.registry()[name]
    wt = wl.Derived(w, wl.TailQuotientShift(p))
    ratios = []
    for j in range(4, 11):
        f = sp.CoefficientSeries(1 / np.arange(1, 2 ** j + 1))
        a = sp.norm_apw(f, p, w).value
        ratios.append((sp.norm_hlpw(f, p, w).value / a, sp.norm_dpw(f, p, wt).value / a))
    ratios = np.array(ratios)
    assert np.all(ratios.max(axis=0) / ratios.min(axis=0) < 1.05)


def test_chain_constants_at_p2_const():
    c = sp.chain_constants(2.0, CONST, sp.structured_corpus(8))
    assert c.c1 == pytest.approx(1 / math.sqrt(2), rel=1e-10)
    assert not c.reverse and c.size == len(sp.structured_corpus(8))


# ---------------------------------------------------------------------------
# CoefficientSeries

def test_series_calculus():
    f = poly(1, 2, 3)
    assert f.derivative() == poly(2, 6)
    assert f.primitive() == poly(0, 1, 1, 1)
    assert f.primitive().derivative() == f
    assert f.hadamard(poly(0, 1, 1)) == poly(0, 2, 3)
    assert f.dilate(0.5) == poly(1, 1, 0.75)
    assert (f + poly(0, 0, 0, 1)).degree == 3


def test_series_io_round_trip(tmp_path):
    f = poly(1, 2 - 1j, 0, 0.25)
    assert sp.CoefficientSeries.from_json(f.to_json()) == f
    assert sp.CoefficientSeries.from_csv(f.to_csv()) == f
    path = tmp_path / "f.json"
    path.write_text(f.to_json())
    assert sp.CoefficientSeries.load(path) == f


def test_bad_json_is_rejected():
    with pytest.raises(ValueError):
        sp.CoefficientSeries.from_json('{"a": 1}')


def test_random_corpus_is_seeded():
    a = sp.random_polynomials(5, 10, seed=1)
    b = sp.random_polynomials(5, 10, seed=1)
    assert all(x == y for x, y in zip(a, b))


coeffs = st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                  min_size=2, max_size=12).filter(lambda c: any(abs(v) > 1e-3 for v in c[1:]))
scalars = st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=25, deadline=None)
@given(c=coeffs, s=scalars)
def test_norms_are_homogeneous(c, s):
    f = sp.CoefficientSeries(c)
    w = wl.Standard(1.0)
    for fn in (lambda g: sp.norm_hp(g, 3), lambda g: sp.norm_apw(g, 1.5, w),
               lambda g: sp.norm_hlpw(g, 0.7, w), lambda g: sp.norm_dpw(g, 2, w)):
        assert fn(f * s).value == pytest.approx(abs(s) * fn(f).value, rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(c=coeffs)
def test_hardy_norms_increase_with_p(c):
    f = sp.CoefficientSeries(c)
    vals = [sp.norm_hp(f, p).value for p in (1.0, 2.0, 4.0)]
    assert vals[0] <= vals[1] * (1 + 1e-12) and vals[1] <= vals[2] * (1 + 1e-12)


@settings(max_examples=25, deadline=None)
@given(c=coeffs)
def test_h2_norm_is_the_coefficient_norm(c):
    f = sp.CoefficientSeries(c)
    assert sp.norm_hp(f, 2).value == pytest.approx(float(np.linalg.norm(c)), rel=1e-12)
