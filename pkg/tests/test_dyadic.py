import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volterra_hinf import dyadic as dy
from volterra_hinf import spaces as sp
from volterra_hinf import weightlib as wl


@pytest.mark.parametrize("n, bounds", [(0, (0, 2)), (1, (2, 4)), (3, (8, 16))])
def test_dyadic_bounds(n, bounds):
    assert dy.dyadic_bounds(n) == bounds


def test_negative_block_index():
    with pytest.raises(ValueError):
        dy.dyadic_bounds(-1)
    with pytest.raises(ValueError):
        dy.unit_block(-1)


def test_unit_blocks():
    assert dy.unit_block(0) == sp.CoefficientSeries([1.0])
    b = dy.unit_block(2)
    assert b.degree == 7 and np.all(b.c[4:8] == 1) and not np.any(b.c[:4])


@pytest.mark.parametrize("n", range(11))
def test_h2_block_norm(n):
    # 2^n unit coefficients: ||Delta_n||_{H^2} = 2^{n/2} (Delta_0 = 1)
    assert dy.delta_norm_sweep(2.0, n).ratios[-1] == 1.0


@pytest.mark.parametrize("p", [4 / 3, 4.0])
def test_block_norm_band(p):
    sw = dy.delta_norm_sweep(p, 10)
    assert 0.25 <= sw.min and sw.max <= 4


def test_block_sweep_needs_p_above_1():
    with pytest.raises(ValueError):
        dy.delta_norm_sweep(1.0, 4)


def test_hadamard():
    f = sp.CoefficientSeries([1, 2, 3])
    assert dy.hadamard(f, dy.unit_block(1)) == sp.CoefficientSeries([0, 0, 3])


def test_const_partition_is_dyadic():
    part = dy.omega_partition(wl.const(), 30)
    n = np.arange(31)
    assert np.all(part.M == 2.0 ** n)
    assert np.all(part.r == 1 - 2.0 ** -n)
    assert part.blocks()[:3] == [(0, 2), (2, 4), (4, 8)]
    assert not part.warnings


def test_std1_partition_levels():
    # tail = (1-r)^2 / 2, mass 1/2: tail(r_n)/mass = 2^{-n} at 1 - r_n = 2^{-n/2}
    part = dy.omega_partition(wl.Standard(1.0), 10)
    assert np.allclose(part.y, np.arange(11) / 2, atol=1e-12)
    assert part.mass == pytest.approx(0.5)


@pytest.mark.parametrize("name", sorted(wl.registry()))
def test_partition_residuals(name):
    part = dy.omega_partition(wl.registry()[name], 30)
    assert np.max(part.residuals) <= 1e-12
    assert np.all(np.diff(part.y) > 0)


def test_loglog_partition_overflows_with_a_warning():
    part = dy.omega_partition(wl.registry()["loglog"], 12)
    assert any("overflow" in w for w in part.warnings)
    with pytest.raises(OverflowError):
        part.block(part.n_max - 1)


def test_partition_needs_a_level():
    with pytest.raises(ValueError):
        dy.omega_partition(wl.const(), 0)


def test_weight_block_extracts_coefficients():
    part = dy.omega_partition(wl.const(), 6)
    f = sp.CoefficientSeries(np.arange(1, 21, dtype=float))
    blk = dy.weight_block(f, part, 2)
    assert np.all(blk.c[4:8] == [5, 6, 7, 8]) and not np.any(blk.c[:4])


def test_decomposition_of_constants_and_z():
    for f in (sp.CoefficientSeries([3.0]), sp.CoefficientSeries([0, 1])):
        sw = dy.decomposition_norm_check(2.0, wl.const(), [f])
        assert sw.ratios[0] == pytest.approx(1.0, rel=1e-12)


def test_decomposition_band_on_a_corpus():
    sw = dy.decomposition_norm_check(2.0, wl.const(), sp.random_polynomials(30, 40, seed=1))
    assert sw.band < 16


def test_decomposition_needs_q_above_1():
    with pytest.raises(ValueError):
        dy.decomposition_norm_check(1.0, wl.const(), [sp.CoefficientSeries([1.0])])


@settings(max_examples=30, deadline=None)
@given(c=st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), min_size=1, max_size=80))
def test_blocks_add_up_to_f(c):
    f = sp.CoefficientSeries(c)
    total = sp.CoefficientSeries.zero()
    for b in dy.dyadic_blocks(f):
        total = total + b
    assert total == f


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 12), m=st.integers(1, 12))
def test_blocks_are_disjoint(n, m):
    if n == m:
        return
    a, b = dy.unit_block(n), dy.unit_block(m)
    assert not np.any(dy.hadamard(a, b).c)
