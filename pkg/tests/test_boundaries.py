import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from recordlab import boundaries as bd
from recordlab.core import gumbel_cdf

N_EEE = math.exp(math.exp(math.e))  # L1 = e^e, L2 = e, L3 = 1


class TestShellExamples:
    def test_triple_exponential_epoch(self):
        s = bd.shell(N_EEE, 0.0, 2)
        assert s.b_star == pytest.approx(math.e**math.e - 1, rel=1e-13)
        assert s.b == s.b_star
        assert s.b_upper == pytest.approx(math.e**math.e + 2 * math.e, rel=1e-13)

    def test_a_n_high_precision(self):
        mp.mp.dps = 40
        L3 = mp.log(mp.log(mp.log(mp.mpf(10) ** 10)))
        ref = float((L3 - 2 * mp.log(L3)) / 2)
        assert bd.a_n(10**10, 2) == pytest.approx(ref, rel=1e-14)
        assert ref == pytest.approx(0.4378, abs=1e-4)

    def test_errors(self):
        with pytest.raises(bd.BoundaryError, match="below admissible epoch"):
            bd.shell(15, 0.0, 2)
        with pytest.raises(bd.BoundaryError, match="log argument nonpositive"):
            bd.shell(10**6, 3.0, 2)
        with pytest.raises(ValueError):
            bd.shell(10**6, 0.0, 1)

    def test_big_integer_epoch(self):
        s = bd.shell(10**300, bd.a_n(10**300, 3), 3)
        assert all(math.isfinite(v) for v in (s.b, s.b_lower, s.b_upper, s.lam, s.epsilon_n))


# below n ~ 50 (d = 2) a_n exceeds ln ln n and b_n(a_n) is undefined
NS = [100, 300, 10**3, 10**6, 10**10, 10**30, 10**100, 10**300]


@pytest.mark.parametrize("n", NS)
@pytest.mark.parametrize("d", [2, 3, 5])
def test_shell_ordering(n, d):
    an = bd.a_n(n, d)
    for a in np.linspace(-an, an, 9) if an > 0 else [0.0]:
        s = bd.shell(n, float(a), d)
        assert s.b >= s.b_star - 1e-12
        assert s.b_lower < s.b_star and s.b_lower < s.b
        assert s.b < s.b_upper
        assert s.lam > 0 and s.epsilon_n > 0 and s.c_n > 0
        if n < 10**30:
            assert s.beta == pytest.approx(n * math.exp(-s.b), rel=1e-9)
        assert 0 < s.h_hat < 1


def test_sqrt_rule_can_break_ordering():
    # the alternative rule puts the inner boundary above b* at a = -a_n
    s = bd.shell(10**6, -bd.a_n(10**6, 2), 2, "sqrt-l3")
    assert s.b_lower > s.b_star


def test_monotone_in_a():
    n, d = 10**8, 2
    a = np.linspace(-1.0, 1.0, 41)
    b = [bd.b_n(n, x, d) for x in a]
    bs = [bd.b_star(n, x, d) for x in a]
    assert np.all(np.diff(b) > 0) and np.all(np.diff(bs) > 0)
    assert bd.b_n(n, 0.0, d) - bd.b_star(n, 0.0, d) == 0.0


def test_omega_rule_growth():
    grid = [10**k for k in (3, 6, 10, 20, 50, 100, 300)]
    w = [bd.omega_n(n, 2) for n in grid]
    assert np.all(np.diff(w) > 0)
    ratio = [math.log(bd.omega_n(n, 2)) / bd.iterated_logs(n).l3 for n in grid]
    assert np.all(np.diff(ratio) < 0)


def test_omega_rules():
    assert bd.omega_n(10**6, 2, 3.5) == 3.5
    assert bd.omega_n(10**6, 2, lambda n, d: 2.0 * d) == 4.0
    assert bd.omega_n(10**6, 2, "sqrt-l3") == 1.05
    assert bd.omega_n(10**300, 2, "l4") == max(1.05, 2 * bd.iterated_logs(10**300).l4)
    with pytest.raises(ValueError):
        bd.omega_n(10**6, 2, "bogus")
    with pytest.raises(ValueError):
        bd.omega_n(10**6, 2, -1.0)
    assert bd.parse_omega_rule("l4") == "l4" and bd.parse_omega_rule("2.5") == 2.5


def test_lambda():
    assert bd.lambda_of(0, 2) == 1.0
    assert bd.lambda_of(0, 3) == 0.5
    assert bd.lambda_of(math.log(2), 2) == pytest.approx(2.0, rel=1e-15)


class TestPhiCirc:
    def test_centering(self):
        n, d = 10**7, 3
        lg = bd.iterated_logs(n)
        assert bd.phi_circ(lg.l1 - lg.l3 - math.log(d - 1), n, d) == pytest.approx(0, abs=1e-12)

    @given(st.floats(-0.4, 0.4))
    def test_inverse_of_boundaries(self, a):
        n, d = 10**9, 2
        L2 = bd.iterated_logs(n).l2
        assert bd.phi_circ(bd.b_star(n, a, d), n, d) == pytest.approx(a, abs=1e-12)
        assert bd.phi_circ(bd.b_n(n, a, d), n, d) == pytest.approx(-L2 * math.log(1 - a / L2), abs=1e-12)

    def test_epoch(self):
        with pytest.raises(bd.BoundaryError):
            bd.phi_circ(1.0, 10, 2)


class TestLimitLaw:
    def test_values(self):
        assert bd.limit_survival(0.0, 2) == pytest.approx(math.exp(-1), abs=1e-15)
        assert bd.limit_survival(-50.0, 2) == pytest.approx(1.0)
        assert bd.limit_survival(50.0, 2) == 0.0

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_reflected_gumbel(self, d):
        a = np.linspace(-5, 5, 201)
        law = bd.gumbel_limit_law(d)
        # P(-G > a) = P(G < -a)
        assert np.allclose(bd.limit_survival(a, d), gumbel_cdf(law, -a), rtol=0, atol=1e-12)
        assert np.all(np.diff(bd.limit_survival(a, d)) <= 0)
        assert np.allclose(bd.limit_cdf(a, d), 1 - bd.limit_survival(a, d), atol=1e-15)


def test_resolve_a():
    n, d = 10**6, 2
    assert bd.resolve_a("a_n", n, d) == bd.a_n(n, d)
    assert bd.resolve_a("-a_n", n, d) == -bd.a_n(n, d)
    assert bd.resolve_a("0.25", n, d) == 0.25
    assert bd.resolve_a(0.5, n, d) == 0.5
