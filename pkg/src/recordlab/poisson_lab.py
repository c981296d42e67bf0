"""Poisson processes on l1 shells: sampling, window maxima counts, the event of
a far point, and the thinned process behind the smallest maximum."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from . import boundaries as bd
from .analytics import gamma_tail
from .core import Point, RngStream
from .quadrature import adaptive_simpson
from .simulate import simulate_shell_counts

# Outer edge used in place of +infinity for the unconditioned count: beyond
# b_upper + 40 the shell mass is n * P(Gamma(d) > b_upper + 40), below 1e-15 n.
FAR_MARGIN = 40.0


@dataclass(frozen=True, eq=False)
class ShellProcessSample:
    """One realisation of the rate-n e^{-||x||} process restricted to (lo, hi]."""

    points: np.ndarray  # (k, d), decreasing norm
    norms: np.ndarray
    lo: float
    hi: float
    n_rate: float
    d: int

    def __len__(self) -> int:
        return self.norms.size

    def as_points(self) -> list[Point]:
        return [Point(p) for p in self.points]


def shell_mean(n, lo: float, hi: float, d: int) -> float:
    """n (P(Gamma(d) > lo) - P(Gamma(d) > hi))."""
    s_hi = 0.0 if math.isinf(hi) else gamma_tail(d, hi)
    return float(n) * (gamma_tail(d, lo) - s_hi)


def _check_shell(lo: float, hi: float) -> None:
    if not lo >= 0 or math.isnan(hi):
        raise ValueError("shell needs 0 <= lo")
    if lo > hi:
        raise ValueError(f"empty shell: lo = {lo} exceeds hi = {hi}")


def sample_shell_process(n, lo: float, hi: float, d: int, rng: RngStream) -> ShellProcessSample:
    _check_shell(lo, hi)
    if n < 1:
        raise ValueError("rate n must be >= 1")
    if lo == hi:
        return ShellProcessSample(np.empty((0, d)), np.empty(0), lo, hi, float(n), d)
    st = rng.kernel_state()
    pts, nrm = _kernels.shell_sample(float(n), float(lo), float(hi), int(d), st)
    rng.load_kernel_state(st)
    return ShellProcessSample(pts, nrm, float(lo), float(hi), float(n), int(d))


def count_window_maxima(sample: ShellProcessSample, w_lo: float, w_hi: float) -> int:
    """Maxima of the whole sample with norm in (w_lo, w_hi]."""
    if not (sample.lo <= w_lo < w_hi <= sample.hi):
        raise ValueError(f"window ({w_lo}, {w_hi}] is not inside the shell ({sample.lo}, {sample.hi}]")
    if len(sample) == 0:
        return 0
    W = np.array([[w_lo, w_hi]], dtype=np.float64)
    return int(_kernels.window_counts(sample.points, sample.norms, W)[0])


def prob_En(n, d: int) -> float:
    """P(the process has a maximum with norm beyond b_upper).

    The point of largest norm beyond b_upper is itself a maximum, since any
    point dominating it would have a larger norm; so the event is just
    "some point beyond b_upper", a Poisson void probability.
    """
    m = float(n) * gamma_tail(d, bd.b_upper(n, d))
    return -math.expm1(-m)


def prob_En_asymptote(n, d: int) -> float:
    lg = bd.iterated_logs(n)
    return math.exp(-(d - 1) * math.log(lg.l1) - math.lgamma(d))


def nu_mass(n, d: int, lo: float, hi: float) -> float:
    """Mean number of points of the thinned process on (lo, hi]."""
    log_n = math.log(n)
    lg = log_n - math.lgamma(d)

    def f(y):
        y = np.asarray(y, dtype=np.float64)
        return np.exp(lg + (d - 1) * np.log(y) - y - np.exp(log_n - y))

    return adaptive_simpson(f, lo, hi, breakpoints=(log_n,)).value


def sample_smallest_nu_point(n, d: int, lo: float, hi: float, rng: RngStream):
    """Smallest-norm point of the thinned process on (lo, hi], or None if it has none.

    Proposals come from the shell process and are kept with probability
    exp(-n e^{-radius}), which never exceeds 1.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    st = rng.kernel_state()
    found, r, p = _kernels.nu_min_point(float(n), float(lo), float(hi), int(d), st)
    rng.load_kernel_state(st)
    if not found:
        return None
    return Point(p), float(r)


def _rng_t0(rng: RngStream) -> int:
    return rng.stream_id << 32


def shell_count_batch(n, a: float, d: int, trials: int, seed: int, *, conditioned: bool,
                      omega_rule: bd.OmegaRule = "default", workers: int = 1, t0: int = 0,
                      lane: int = _kernels.LANE_SHELL) -> np.ndarray:
    """Per-trial maxima counts in (b_lower, b_n(a)].

    ``conditioned=True`` samples the shell up to b_upper; otherwise up to
    b_upper + FAR_MARGIN, which stands in for the whole orthant.
    """
    sb = bd.shell(n, a, d, omega_rule)
    hi = sb.b_upper if conditioned else sb.b_upper + FAR_MARGIN
    counts, _ = simulate_shell_counts(n, sb.b_lower, hi, d, [[sb.b_lower, sb.b]], trials, seed,
                                      workers=workers, t0=t0, lane=lane)
    return counts[:, 0]


def gap_statistics(x) -> tuple[float, float]:
    """Sample variance minus sample mean, with a delta-method standard error.

    Influence function of var - mean: (x - m)^2 - s^2 - (x - m).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        raise ValueError("need at least two observations")
    m = float(x.mean())
    c = x - m
    s2 = float(np.dot(c, c) / (x.size - 1))
    psi = c * c - s2 - c
    return s2 - m, float(psi.std(ddof=1) / math.sqrt(x.size))


def variance_mean_gap(n, a: float, d: int, trials: int, rng: RngStream, *,
                      omega_rule: bd.OmegaRule = "default", workers: int = 1) -> tuple[float, float]:
    """Dispersion gap of the conditioned shell count, with its standard error."""
    if trials < 10_000:
        raise ValueError("variance gap needs at least 1e4 trials")
    counts = shell_count_batch(n, a, d, trials, rng.seed, conditioned=True, omega_rule=omega_rule,
                               workers=workers, t0=_rng_t0(rng), lane=rng.lane)
    return gap_statistics(counts)


def poisson_control_gap(lam: float, trials: int, rng: RngStream) -> tuple[float, float]:
    return gap_statistics(rng.generator.poisson(lam, trials))
