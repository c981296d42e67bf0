"""Closed forms and integrals: Gamma tails, expected record counts, mean
brackets for the conditioned Poisson count, and small Monte-Carlo integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicHermiteSpline
from scipy.special import hyp1f1

from . import boundaries as bd
from .core import RngStream
from .quadrature import adaptive_simpson, tail_cutoff


def _scalar_or_array(out):
    out = np.asarray(out)
    return float(out) if out.ndim == 0 else out


def log_gamma_tail(d: int, x):
    """log P(Gamma(d, 1) > x) for x >= 0."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise ValueError("gamma_tail needs x >= 0")
    if int(d) != d or d < 1:
        raise ValueError(f"shape must be a positive integer, got {d!r}")
    term = np.ones_like(x)
    acc = np.ones_like(x)
    for j in range(1, int(d)):
        term = term * x / j
        acc = acc + term
    with np.errstate(invalid="ignore"):
        out = np.where(np.isinf(x), -np.inf, -x + np.log(acc))
    return _scalar_or_array(out)


def gamma_tail(d: int, x):
    """P(Gamma(d, 1) > x) = e^-x sum_{j<d} x^j / j! = P(Poisson(x) <= d - 1)."""
    return _scalar_or_array(np.exp(log_gamma_tail(d, x)))


# --------------------------------------------------------------------------
# Expected number of maxima below a norm level
# --------------------------------------------------------------------------

def _log_n(n) -> float:
    return math.log(n)


def _rho_integrand(n, d: int):
    log_n = _log_n(n)
    log_norm = log_n - math.lgamma(d)
    nm1 = float(n) - 1.0

    def f(y):
        y = np.asarray(y, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = log_norm + (d - 1) * np.log(y) - y
            if nm1 > 0:
                lg = lg + nm1 * np.log1p(-np.exp(-y))
            out = np.exp(lg)
        return np.where(y > 0, out, 0.0)

    return f


def expected_rho(n, b: float, d: int) -> float:
    """E rho_n(b): mean number of maxima among n Model-E points with norm <= b."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if b <= 0:
        return 0.0
    f = _rho_integrand(n, d)
    peak = max(_log_n(n), d - 1.0)
    upper = tail_cutoff(f, peak, step=1.0) if math.isinf(b) else b
    upper = min(upper, b)
    br = [p for p in (peak - 5.0, peak - 1.0, peak, peak + 3.0, peak + 10.0) if 0 < p < upper]
    return adaptive_simpson(f, 0.0, upper, breakpoints=br).value


def harmonic(n: int) -> float:
    return math.fsum(1.0 / k for k in range(1, int(n) + 1))


def _admissible_a(n, a: float, d: int) -> None:
    an = bd.a_n(n, d)
    if abs(a) > an * (1 + 1e-12):
        raise bd.BoundaryError(f"|a| = {abs(a)} exceeds a_n = {an}")


def delta_mean(n, a: float, d: int) -> float:
    """E[rho_n(b_n(a)) - rho_n(b*_n(a))], the mean count between the two boundaries."""
    _admissible_a(n, a, d)
    lo = bd.b_star(n, a, d)
    hi = bd.b_n(n, a, d)
    if hi <= lo:
        return 0.0
    return adaptive_simpson(_rho_integrand(n, d), lo, hi).value


def delta_mean_scale(n, d: int) -> float:
    """Asymptotic size of delta_mean at a = a_n: L2^{-1/2} L3 / (8 (d-1) (d-1)!)."""
    lg = bd.iterated_logs(n)
    return lg.l3 / math.sqrt(lg.l2) / (8.0 * (d - 1) * math.factorial(d - 1))


def J_j(j: int, x: float) -> float:
    """Integral over (x, inf) of (ln z)^j e^{-z}, tail cut at x + 60."""
    if not x > 1.0:
        raise ValueError("J_j is used only for x > 1")
    if int(j) != j or j < 0:
        raise ValueError("j must be a nonnegative integer")

    # factor e^{-x} out so the tolerance is relative to the integral's scale
    def f(t):
        return np.log(x + t) ** j * np.exp(-t)

    inner = adaptive_simpson(f, 0.0, 60.0, abs_tol=1e-14).value
    return math.exp(-x) * inner


# --------------------------------------------------------------------------
# Conditioned count in the shell
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("bracket ends must be finite")
        if self.lo > self.hi:
            raise ValueError(f"bracket lo {self.lo} exceeds hi {self.hi}")

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float, margin: float = 0.0) -> bool:
        return self.lo - margin <= x <= self.hi + margin


def _nbar_integral(n, sb: bd.ShellBoundaries, u_mode: str) -> float:
    d = sb.d
    log_n = _log_n(n)
    log_norm = log_n - math.lgamma(d)
    h = sb.h_hat

    def f(y):
        y = np.asarray(y, dtype=np.float64)
        if u_mode == "zero":
            u = 0.0
        elif u_mode == "hhat":
            u = h
        else:
            u = gamma_tail(d, np.maximum(sb.b_upper - y, 0.0))
        mass_above = np.exp(log_n - y)  # n e^{-y}
        return np.exp(log_norm + (d - 1) * np.log(y) - y - (1.0 - u) * mass_above)

    return adaptive_simpson(f, sb.b_lower, sb.b).value


def expected_Nbar(n, a: float, d: int, omega_rule: bd.OmegaRule = "default") -> float:
    """E of the conditioned shell count, with the exact correction term."""
    _admissible_a(n, a, d)
    return _nbar_integral(n, bd.shell(n, a, d, omega_rule), "exact")


def expected_Nbar_bracket(n, a: float, d: int, omega_rule: bd.OmegaRule = "default") -> Bracket:
    """Enclosure of the conditioned mean: correction set to 0 (lo) and to its sup (hi)."""
    _admissible_a(n, a, d)
    sb = bd.shell(n, a, d, omega_rule)
    return Bracket(_nbar_integral(n, sb, "zero"), _nbar_integral(n, sb, "hhat"))


def p_n(n, d: int, omega_rule: bd.OmegaRule = "default") -> float:
    """P(Gamma(d) > inner boundary): mean shell mass per original point."""
    return gamma_tail(d, max(bd.b_lower(n, d, omega_rule), 0.0))


def p_n_asymptote(n, d: int, omega_rule: bd.OmegaRule = "default") -> float:
    lg = bd.iterated_logs(n)
    w = bd.omega_n(n, d, omega_rule)
    return math.exp((d - 1) * math.log(lg.l1) - math.log(n) + math.log(lg.l2 * w) - math.lgamma(d))


def erho_blower_bound(n, d: int, omega_rule: bd.OmegaRule = "default") -> tuple[float, float]:
    """(E rho_n(inner boundary), (ln n)^{d-1-omega} / (d-1)!)."""
    lg = bd.iterated_logs(n)
    w = bd.omega_n(n, d, omega_rule)
    value = expected_rho(n, bd.b_lower(n, d, omega_rule), d)
    comparison = math.exp((d - 1 - w) * math.log(lg.l1) - math.lgamma(d))
    return value, comparison


def b_tilde(n, c_tilde: float, d: int) -> float:
    lg = bd.iterated_logs(n)
    return lg.l1 - lg.l3 - math.log(c_tilde)


def moment_bounds(n, c_tilde: float, d: int) -> tuple[float, float]:
    """Leading terms of the bounds on P(phi_n <= b_tilde) and P(phi_n >= b_tilde)."""
    if not c_tilde > 0:
        raise ValueError("c_tilde must be positive")
    lg = bd.iterated_logs(n)
    e = d - 1 - c_tilde
    upper_leq = math.exp(e * math.log(lg.l1) - math.lgamma(d))
    upper_geq = math.exp(math.lgamma(d) - e * math.log(lg.l1))
    return upper_leq, upper_geq


# --------------------------------------------------------------------------
# Simplex-pair overlap probability and the double-shell integral
# --------------------------------------------------------------------------

def _simplex(rng: RngStream, m: int, d: int) -> np.ndarray:
    e = rng.exponential(m * d).reshape(m, d)
    return e / e.sum(axis=1, keepdims=True)


def qn_bound(d: int, eps: float) -> float:
    return (2 ** d - 2) * eps ** (d - 1)


def qn_small_eps_coefficient(d: int) -> int:
    """c_d with P(sum_j max(U_j, V_j) < 1 + eps) ~ c_d eps^{d-1} as eps -> 0.

    The difference of two independent uniform simplex points has density
    (d-1)! at the origin; the region sum_j (V_j - U_j)^+ < eps splits by the
    sign pattern of V - U, and a pattern with k positive entries has volume
    eps^{d-1} C(d-2, k-1) / (d-1)!.
    """
    return sum(math.comb(d, k) * math.comb(d - 2, k - 1) for k in range(1, d))


def qn_bound_and_estimate(d: int, eps: float, trials: int, rng: RngStream,
                          chunk: int = 1_000_000) -> tuple[float, float, float]:
    """(bound, Monte-Carlo estimate, standard error) for the simplex-pair overlap."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    hits = 0
    left = int(trials)
    while left > 0:
        m = min(chunk, left)
        U = _simplex(rng, m, d)
        V = _simplex(rng, m, d)
        hits += int(np.count_nonzero(np.maximum(U, V).sum(axis=1) < 1.0 + eps))
        left -= m
    q = hits / trials
    se = math.sqrt(max(q * (1 - q), 0.0) / trials)
    return qn_bound(d, eps), q, se


def _gumbel_sample(rng: RngStream, m: int, lo: float, hi: float) -> np.ndarray:
    """Standard Gumbel truncated to (lo, hi), by inversion."""
    glo = math.exp(-math.exp(-lo))
    ghi = math.exp(-math.exp(-hi))
    u = glo + (ghi - glo) * rng.uniform(m)
    return -np.log(-np.log(u))


def jn_shell_mass(n, a: float, d: int, omega_rule: bd.OmegaRule = "default") -> float:
    """Gumbel mass of the shifted shell: (ln n)^{-c_n} - (ln n)^{-omega}."""
    sb = bd.shell(n, a, d, omega_rule)
    return math.exp(-sb.beta) - math.exp(-sb.beta_lower)


def chen_stein_Jn(n, a: float, d: int, trials: int, rng: RngStream,
                  omega_rule: bd.OmegaRule = "default", chunk: int = 500_000) -> tuple[float, float]:
    """Monte-Carlo value of the double-shell integral in radius/direction form.

    Radii shifted by ln n follow the Gumbel density restricted to the shell;
    directions are independent uniform simplex points; the indicator is the
    joint-maximum constraint.  The direction integrals are Lebesgue, so each
    carries a factor 1/(d-1)!.
    """
    _admissible_a(n, a, d)
    sb = bd.shell(n, a, d, omega_rule)
    L = sb.logs.l1
    lo, hi = sb.b_lower - L, sb.b - L
    mass = math.exp(-sb.beta) - math.exp(-sb.beta_lower)
    total = 0.0
    total2 = 0.0
    left = int(trials)
    while left > 0:
        m = min(chunk, left)
        s = _gumbel_sample(rng, m, lo, hi)
        t = _gumbel_sample(rng, m, lo, hi)
        U = _simplex(rng, m, d)
        V = _simplex(rng, m, d)
        z = (L + s)[:, None]
        w = (L + t)[:, None]
        ok = np.maximum(U * z, V * w).sum(axis=1) < sb.b_upper
        wt = np.where(ok, ((L + s) * (L + t)) ** (d - 1), 0.0)
        total += float(wt.sum())
        total2 += float((wt * wt).sum())
        left -= m
    mean = total / trials
    var = max(total2 / trials - mean * mean, 0.0)
    scale = mass * mass / math.factorial(d - 1) ** 2
    return scale * mean, scale * math.sqrt(var / trials)


def jn_upper_chain(n, a: float, d: int, q_prob: float,
                   omega_rule: bd.OmegaRule = "default") -> tuple[float, float]:
    """Two upper bounds for the double-shell integral given an overlap probability.

    ``q_prob`` must be the overlap probability at tolerance b_upper / b_lower - 1
    (radii range down to the inner boundary).  Returns
    (b^{2(d-1)} mass^2 q, e^{2(d-1)a} q) with q in Lebesgue units.
    """
    sb = bd.shell(n, a, d, omega_rule)
    q_leb = q_prob / math.factorial(d - 1) ** 2
    mass = math.exp(-sb.beta) - math.exp(-sb.beta_lower)
    first = sb.b ** (2 * (d - 1)) * mass * mass * q_leb
    second = math.exp(2 * (d - 1) * a) * q_leb
    return first, second


def jn_order_scale(n, d: int) -> float:
    """(ln n)^{-(d-1)} (L2)^d (L3)^{-2}."""
    lg = bd.iterated_logs(n)
    return lg.l1 ** (-(d - 1)) * lg.l2 ** d / lg.l3 ** 2


# --------------------------------------------------------------------------
# Norm of the smallest maximum when n = 2
# --------------------------------------------------------------------------

def sigma2_norm_density(r, d: int):
    """Density of the norm of the smallest-norm maximum of two Model-E points.

    Integrating the joint density over the slice ||s|| = r needs
    int prod_j (1 - e^{-s_j}); expanding the product, each term
    e^{-(s_1 + ... + s_k)} integrates to r^{d-1}/(d-1)! 1F1(k; d; -r).
    Kummer's transformation keeps the hypergeometric argument positive.
    """
    r = np.asarray(r, dtype=np.float64)
    rp = np.maximum(r, 0.0)
    with np.errstate(over="ignore", invalid="ignore"):
        base = np.exp((d - 1) * np.log(np.where(rp > 0, rp, 1.0)) - math.lgamma(d))
        base = np.where(rp > 0, base, 0.0 if d > 1 else 1.0)
        slice_int = np.zeros_like(rp)
        for k in range(d + 1):
            m = np.exp(-rp) * hyp1f1(d - k, d, rp)  # = 1F1(k; d; -r)
            slice_int = slice_int + math.comb(d, k) * (-1) ** k * m
        poly = np.zeros_like(rp)
        term = np.ones_like(rp)
        for j in range(1, d):
            term = term * rp / j
            poly = poly + term
        out = 2.0 * np.exp(-rp) * base * (slice_int + np.exp(-rp) * poly)
    out = np.where(r > 0, out, 0.0)
    return _scalar_or_array(out)


class Sigma2NormLaw:
    """Distribution function of that norm, by composite Gauss-Legendre on a fine
    grid plus cubic Hermite interpolation (the derivative is the density)."""

    def __init__(self, d: int, upper: float = 80.0, step: float = 0.01, order: int = 12):
        self.d = d
        nodes = np.arange(0.0, upper + step, step)
        x, w = leggauss(order)
        a, b = nodes[:-1, None], nodes[1:, None]
        pts = 0.5 * (b - a) * x[None, :] + 0.5 * (a + b)
        vals = sigma2_norm_density(pts.ravel(), d).reshape(pts.shape)
        pieces = 0.5 * (b - a)[:, 0] * (vals * w[None, :]).sum(axis=1)
        F = np.concatenate([[0.0], np.cumsum(pieces)])
        self.total = float(F[-1])
        self._nodes = nodes
        self._spline = CubicHermiteSpline(nodes, F, sigma2_norm_density(nodes, d))

    def cdf(self, y):
        y = np.asarray(y, dtype=np.float64)
        out = np.where(y <= 0, 0.0, np.where(y >= self._nodes[-1], 1.0, self._spline(np.clip(y, 0, self._nodes[-1]))))
        return _scalar_or_array(out)

    def __call__(self, y):
        return self.cdf(y)


def sigma2_density_integral(d: int) -> float:
    """Total mass of the radial density by adaptive Simpson (should be 1)."""
    f = lambda r: sigma2_norm_density(r, d)  # noqa: E731
    return adaptive_simpson(f, 0.0, 80.0, breakpoints=(1.0, 5.0, 20.0)).value
