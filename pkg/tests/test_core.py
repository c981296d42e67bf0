import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from recordlab.core import (
    DimensionError,
    GumbelLaw,
    Point,
    RngStream,
    gumbel_cdf,
    gumbel_quantile,
    l1_norm,
    sample_exponential_point,
    sample_simplex_uniform,
    simplex_points,
    exponential_points,
    strictly_dominates,
)
from recordlab.distances import d_K, dkw_radius


class TestPoint:
    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            Point([1.0, 0.0])
        with pytest.raises(ValueError):
            Point([1.0, -2.0])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            Point([1.0, math.inf])
        with pytest.raises(ValueError):
            Point([1.0, math.nan])

    def test_dimension_one_only_for_helpers(self):
        with pytest.raises(DimensionError):
            Point([1.0])
        assert Point([1.0], min_dim=1).d == 1


class TestDominance:
    def test_examples(self):
        assert strictly_dominates(Point([1, 2]), Point([2, 3]))
        assert not strictly_dominates(Point([1, 2]), Point([2, 1]))
        assert not strictly_dominates(Point([2, 1]), Point([1, 2]))
        assert not strictly_dominates(Point([1, 2]), Point([1, 3]))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            strictly_dominates(Point([1, 2]), Point([1, 2, 3]))

    coords = st.lists(st.floats(0.01, 10.0), min_size=3, max_size=3)

    @given(coords, coords, coords)
    def test_strict_partial_order(self, a, b, c):
        x, y, z = Point(a), Point(b), Point(c)
        assert not strictly_dominates(x, x)
        assert not (strictly_dominates(x, y) and strictly_dominates(y, x))
        if strictly_dominates(x, y) and strictly_dominates(y, z):
            assert strictly_dominates(x, z)

    @given(coords, coords)
    def test_dominance_orders_norms(self, a, b):
        if strictly_dominates(Point(a), Point(b)):
            assert l1_norm(Point(a)) < l1_norm(Point(b))


def test_l1_norm_examples():
    assert l1_norm(Point([1, 2])) == 3
    assert l1_norm(Point([0.5, 0.5, 0.5])) == 1.5


class TestGumbel:
    def test_values(self):
        std = GumbelLaw(0.0, 1.0)
        assert gumbel_cdf(std, 0.0) == pytest.approx(math.exp(-1), abs=1e-15)
        assert gumbel_cdf(std, -1e3) == 0.0
        assert gumbel_cdf(std, 1e3) == 1.0
        law = GumbelLaw(-math.log(2) / 2, 0.5)
        assert gumbel_cdf(law, -math.log(2) / 2) == pytest.approx(math.exp(-1), abs=1e-15)

    def test_quantiles(self):
        std = GumbelLaw(0.0, 1.0)
        assert gumbel_quantile(std, math.exp(-1)) == pytest.approx(0.0, abs=1e-15)
        assert gumbel_quantile(std, math.exp(-math.e)) == pytest.approx(-1.0, abs=1e-14)
        u = np.linspace(0.01, 0.99, 99)
        for law in (std, GumbelLaw(1.3, 0.25)):
            assert np.allclose(gumbel_cdf(law, gumbel_quantile(law, u)), u, rtol=1e-12, atol=0)

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            GumbelLaw(0.0, 0.0)
        with pytest.raises(ValueError):
            gumbel_quantile(GumbelLaw(0, 1), 1.0)

    def test_monotone(self):
        x = np.linspace(-10, 10, 1001)
        assert np.all(np.diff(gumbel_cdf(GumbelLaw(0.3, 2.0), x)) >= 0)


class TestRngStream:
    def test_reproducible(self):
        a = RngStream(7, 3).raw(10_000)
        b = RngStream(7, 3).raw(10_000)
        assert a.tobytes() == b.tobytes()

    def test_streams_differ(self):
        a = RngStream(7, 3).raw(10_000)
        b = RngStream(7, 4).raw(10_000)
        assert np.all(a != b)

    def test_lanes_differ(self):
        assert np.all(RngStream(7, 3, 0).raw(1000) != RngStream(7, 3).sub(1).raw(1000))

    def test_uniform_open_interval(self):
        u = RngStream(1).uniform(10**5)
        assert u.min() > 0 and u.max() < 1

    def test_range_checks(self):
        with pytest.raises(ValueError):
            RngStream(-1)
        with pytest.raises(ValueError):
            RngStream(0, 2**64)


class TestSamplers:
    def test_exponential_moments(self):
        X = exponential_points(10**6, 2, RngStream(11))
        assert np.allclose(X.mean(axis=0), 1.0, atol=0.004)
        assert np.allclose((X > 1).mean(axis=0), math.exp(-1), atol=0.002)
        d = 3
        norms = exponential_points(10**6, d, RngStream(12)).sum(axis=1)
        assert abs(norms.mean() - d) <= 3 * math.sqrt(d / 10**6)

    def test_single_point(self):
        p = sample_exponential_point(4, RngStream(2))
        assert p.d == 4
        with pytest.raises(DimensionError):
            sample_exponential_point(1, RngStream(2))
        with pytest.raises(DimensionError):
            sample_simplex_uniform(1, RngStream(2))

    def test_simplex_on_simplex(self):
        U = simplex_points(10**4, 5, RngStream(3))
        assert np.allclose(U.sum(axis=1), 1.0, atol=1e-12)
        assert abs(l1_norm(sample_simplex_uniform(3, RngStream(4))) - 1) < 1e-12

    def test_simplex_d2_uniform(self):
        U = simplex_points(10**6, 2, RngStream(5))
        assert stats.kstest(U[:, 0], "uniform").pvalue > 1e-3

    def test_simplex_marginals_beta(self):
        for d in (3, 4):
            U = simplex_points(10**6, d, RngStream(6 + d))
            assert abs(U[:, 0].mean() - 1 / d) < 0.001
            for j in range(d):
                dist = d_K(U[:, j], lambda t: stats.beta.cdf(t, 1, d - 1))
                assert dist <= dkw_radius(10**6, 0.999)
