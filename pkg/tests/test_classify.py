import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volterra_hinf import classify as cl
from volterra_hinf import weightlib as wl

# tail(r) / tail((1+r)/2) = 2^{alpha+1} for (1-r)^alpha at every r
DHAT_CONSTANTS = [(0.0, 2.0), (1.0, 4.0), (-0.5, 2 ** 0.5), (3.0, 16.0)]


@pytest.mark.parametrize("alpha, C", DHAT_CONSTANTS)
def test_upper_doubling_constant_of_power_weights(alpha, C):
    m = cl.check_dhat(wl.Standard(alpha))
    assert m.verdict == cl.MEMBER
    assert m.C == pytest.approx(C, rel=1e-9)


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.5])
def test_lower_doubling_constant_at_k2(alpha):
    m = cl.check_dcheck(wl.Standard(alpha), K=2)
    assert m.verdict == cl.MEMBER
    assert m.C == pytest.approx(2 ** (alpha + 1), rel=1e-9)


@pytest.mark.parametrize("alpha", [0.0, 1.0, 3.0])
def test_exponents_of_power_weights(alpha):
    rep = cl.classify(wl.Standard(alpha))
    assert rep.beta == pytest.approx(alpha + 1, abs=0.05)
    assert rep.eta == pytest.approx(alpha + 1, abs=0.05)


def test_exponential_weight_is_not_upper_doubling():
    rep = cl.classify(wl.Exponential(1.0, 1.0))
    assert rep.dhat.verdict == cl.NON_MEMBER
    assert rep.d == cl.NON_MEMBER
    assert rep.beta is None


def test_loglog_weight_is_only_upper_doubling():
    rep = cl.classify(wl.registry()["loglog"])
    assert rep.dhat.verdict == cl.MEMBER
    assert rep.dcheck.verdict == cl.NON_MEMBER


@pytest.mark.parametrize("name", sorted(wl.registry()))
def test_two_sided_class_is_the_intersection(name):
    rep = cl.classify(wl.registry()[name])
    both = rep.dhat.verdict == cl.MEMBER and rep.dcheck.verdict == cl.MEMBER
    assert (rep.d == cl.MEMBER) == both


@pytest.mark.parametrize("name", sorted(wl.registry()))
def test_registry_is_upper_doubling(name):
    assert cl.check_dhat(wl.registry()[name]).verdict == cl.MEMBER


def test_moment_tail_ratio_of_const():
    xs = np.array([1.0, 10.0, 100.0])
    sw = cl.verify_moment_tail(wl.const(), xs)
    assert np.allclose(sw.ratios, [0.5, 10 / 11, 100 / 101], rtol=0, atol=1e-12)


def test_moment_tail_ratio_needs_x_at_least_one():
    with pytest.raises(ValueError):
        cl.verify_moment_tail(wl.const(), [0.5])


@pytest.mark.parametrize("name", ["std1", "std-0.5", "logpow", "dualw"])
def test_moment_tail_ratio_stays_in_a_band(name):
    sw = cl.verify_moment_tail(wl.registry()[name], np.logspace(0, 4, 41))
    assert sw.band < 10


def test_refinement_does_not_lower_the_constant():
    w = wl.registry()["logpow"]
    cs = [cl.check_dhat(w, cl.GridSpec(depth=d)).C for d in (8, 16, 32)]
    assert cs == sorted(cs)


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        cl.GridSpec(depth=2)
    g = cl.GridSpec(depth=8, q=2)
    assert g.levels() == (4, 8, 16)
    assert g.nodes()[-1] == 1 - 2.0 ** -8


def test_report_serializes():
    d = cl.classify(wl.const()).to_dict()
    assert d["d"] == cl.MEMBER and d["grid"]["depth"] == 40


@settings(max_examples=15, deadline=None)
@given(alpha=st.floats(-0.9, 6.0))
def test_dhat_constant_matches_closed_form(alpha):
    m = cl.check_dhat(wl.Standard(alpha), cl.GridSpec(depth=12))
    assert m.C == pytest.approx(2 ** (alpha + 1), rel=1e-8)
