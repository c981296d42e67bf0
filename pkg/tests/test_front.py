import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recordlab.core import DimensionError, Point
from recordlab.front import (
    ParetoFront,
    front_brute,
    front_fold,
    front_insert,
    front_offline,
    record_stats,
    rho,
    smallest_max_density_n2,
)


def F(*pts):
    return front_offline([Point(p) for p in pts])


class TestOffline:
    def test_examples(self):
        assert F((1, 2), (2, 1), (0.5, 0.5)).coord_set() == {(1.0, 2.0), (2.0, 1.0)}
        assert F((1, 2)).coord_set() == {(1.0, 2.0)}
        assert F((1, 1), (2, 2), (3, 3)).coord_set() == {(3.0, 3.0)}

    def test_errors(self):
        with pytest.raises(ValueError):
            front_offline([])
        with pytest.raises(DimensionError):
            front_offline([(1.0, 2.0), (1.0, 2.0, 3.0)])

    def test_norm_order(self):
        f = F((1, 2.5), (2, 1), (0.1, 9))
        assert list(f.norms()) == sorted(f.norms())

    def test_ties_block_dominance(self):
        assert len(F((1, 2), (1, 3))) == 2

    def test_permutation_invariance(self):
        rng = np.random.default_rng(0)
        P = rng.exponential(size=(300, 3))
        ref = front_offline(P)
        for _ in range(100):
            assert front_offline(P[rng.permutation(300)]) == ref


class TestInsert:
    def test_examples(self):
        f = F((1, 2), (2, 1))
        assert front_insert(f, Point((3, 3))).coord_set() == {(3.0, 3.0)}
        assert front_insert(f, Point((0.5, 0.5))) == f

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            front_insert(F((1, 2)), Point((1, 2, 3)))

    def test_fold_matches_offline_d3(self):
        P = np.random.default_rng(1).exponential(size=(1000, 3))
        assert front_fold(P) == front_offline(P)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 4), st.lists(st.tuples(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6),
                                                 st.integers(1, 6)), min_size=1, max_size=40))
    def test_fold_offline_brute_agree(self, d, rows):
        P = np.array([r[:d] for r in rows], dtype=np.float64)
        a, b, c = front_fold(P), front_offline(P), front_brute(P)
        assert a == b == c
        # front invariants: mutual non-domination, and everything else is dominated
        arr = b.as_array()
        for p in arr:
            assert not np.any(np.all(arr > p, axis=1))
        for p in P:
            if tuple(p) not in b.coord_set():
                assert np.any(np.all(arr > p, axis=1))


class TestRho:
    def test_examples(self):
        f = F((1, 2), (2, 1))
        assert rho(f, 3) == 2
        assert rho(f, 2.9) == 0
        assert rho(f, math.inf) == len(f)
        assert rho(f, -1.0) == 0

    def test_switching_relation(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            f = front_offline(rng.exponential(size=(200, 2)))
            phi = record_stats(f).phi
            for b in np.linspace(0, 12, 61):
                assert (phi > b) == (rho(f, b) == 0)


class TestRecordStats:
    def test_example(self):
        s = record_stats(F((1, 2), (2, 1), (4, 0.1)))
        assert s.phi == 3 and s.f_plus == pytest.approx(4.1) and s.count == 3
        # tie at norm 3 is broken lexicographically
        assert s.sigma.coords == (1.0, 2.0)
        assert sum(s.sigma_direction.coords) == pytest.approx(1.0, abs=1e-15)

    def test_single(self):
        s = record_stats(F((0.3, 0.9)))
        assert s.phi == s.f_plus == pytest.approx(1.2)

    def test_empty(self):
        with pytest.raises(ValueError):
            record_stats(ParetoFront((), 2))


class TestDensityN2:
    def test_value_at_ones(self):
        # expanded form: 2e^-2 (1 - 2e^-1 + e^-2) + 4e^-4
        e = math.exp
        assert smallest_max_density_n2(Point((1, 1))) == pytest.approx(
            2 * e(-2) - 4 * e(-3) + 2 * e(-4) + 4 * e(-4), rel=1e-14)

    def test_domain(self):
        with pytest.raises(ValueError):
            smallest_max_density_n2((0.0, 1.0))

    def test_nonnegative(self):
        rng = np.random.default_rng(3)
        for s in rng.exponential(size=(200, 3)) + 1e-9:
            assert smallest_max_density_n2(s) >= 0
