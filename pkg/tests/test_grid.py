import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from locscape.grid import (GridShape, PotentialSpec, ScalarField, UnitConvention, lp_difference,
                           make_potential, mix_seed, normalize01)

from conftest import random_field


def test_grid_conventions():
    d = GridShape.domain(64)
    assert d.h * d.n == 1.0
    assert d.convention is UnitConvention.DOMAIN
    assert GridShape.lattice(64).h == 1.0
    assert GridShape(8).convention is UnitConvention.DOMAIN
    with pytest.raises(ValueError):
        GridShape(3)


def test_scalar_field_rejects_nonfinite_and_wrong_size():
    s = GridShape.domain(4)
    with pytest.raises(ValueError):
        ScalarField(s, np.zeros(15))
    with pytest.raises(ValueError):
        ScalarField(s, np.full((4, 4), np.nan))
    f = ScalarField.constant(s, 2.0)
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0


def test_potential_zero_vmax_is_zero():
    V = make_potential(PotentialSpec(0.0, 11), GridShape.domain(16))
    assert np.all(V.values == 0.0)


def test_potential_mean_within_four_standard_errors():
    n = 256
    V = make_potential(PotentialSpec(1.0, 7), GridShape.domain(n))
    assert V.values.min() >= 0 and V.values.max() <= 1.0
    assert abs(V.values.mean() - 0.5) < 4 * (1 / math.sqrt(12)) / n


def test_potential_is_deterministic():
    s = GridShape.lattice(64)
    a = make_potential(PotentialSpec(5.0, 123), s)
    b = make_potential(PotentialSpec(5.0, 123), s)
    c = make_potential(PotentialSpec(5.0, 124), s)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_mix_seed_is_64bit_and_spreads():
    seeds = {mix_seed(42, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert all(0 <= s < 2 ** 64 for s in seeds)
    # adding instances never changes earlier ones
    assert mix_seed(42, 3) == mix_seed(42, 3)


def test_normalize01_examples():
    s = GridShape.domain(4)
    f = ScalarField(s, np.tile([2.0, 4.0, 6.0, 4.0], (4, 1)))
    g = normalize01(f)
    assert set(np.unique(g.values)) == {0.0, 0.5, 1.0}
    h = ScalarField(s, np.linspace(0, 1, 16))
    assert np.array_equal(normalize01(h).values, h.values)
    with pytest.raises(ValueError, match="degenerate range"):
        normalize01(ScalarField.constant(s, 3.0))


def test_lp_difference_examples(convention):
    s = GridShape(8, convention)
    f = random_field(s, 1)
    for p in ("L1", "L2", "Linf"):
        assert lp_difference(f, f, p) == 0.0
        g = ScalarField(s, f.values + 0.3)
        assert lp_difference(f, g, p) == pytest.approx(0.3, rel=1e-12)
    with pytest.raises(ValueError):
        lp_difference(f, random_field(GridShape(16, convention), 1), "L1")


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32), st.integers(4, 12))
def test_normalize_idempotent(seed, n):
    f = random_field(GridShape.domain(n), seed, -5, 5)
    once = normalize01(f)
    assert np.allclose(normalize01(once).values, once.values, atol=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32), st.sampled_from(["L1", "L2", "Linf"]))
def test_lp_difference_is_a_metric(seed, p):
    s = GridShape.domain(8)
    f, g, h = (random_field(s, seed + i) for i in range(3))
    dfg = lp_difference(f, g, p)
    assert dfg >= 0
    assert dfg == pytest.approx(lp_difference(g, f, p), rel=1e-14)
    assert lp_difference(f, h, p) <= dfg + lp_difference(g, h, p) + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 63), st.floats(0, 10))
def test_potential_pure_function_of_inputs(seed, vmax):
    s = GridShape.domain(8)
    a = make_potential(PotentialSpec(vmax, seed), s)
    b = make_potential(PotentialSpec(vmax, seed), s)
    assert np.array_equal(a.values, b.values)
    assert a.values.min() >= 0 and a.values.max() <= vmax
