"""Distances between laws (total variation, Kolmogorov), concentration radii
and the two hypothesis tests used by the checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from .core import RngStream

PMF_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscretePMF:
    """Law on {0, 1, 2, ...}: ``probs[k] = P(k)`` plus mass beyond ``len(probs) - 1``."""

    probs: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "probs", p)
        if np.any(p < 0) or self.tail_mass < 0 or not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite and nonnegative")
        total = math.fsum(p) + self.tail_mass
        if abs(total - 1.0) > PMF_TOL:
            raise ValueError(f"pmf is not normalized: total mass {total!r}")

    def __getitem__(self, k: int) -> float:
        return float(self.probs[k]) if 0 <= k < self.probs.size else 0.0

    def as_dict(self) -> dict[int, float]:
        return {int(k): float(v) for k, v in enumerate(self.probs) if v > 0}

    def mean(self) -> float:
        return float(np.dot(np.arange(self.probs.size), self.probs))


def poisson_pmf(lam: float, tol: float = PMF_TOL) -> DiscretePMF:
    if not lam >= 0:
        raise ValueError("Poisson mean must be nonnegative")
    if lam == 0:
        return DiscretePMF(np.array([1.0]))
    kmax = int(stats.poisson.isf(tol, lam)) + 1
    p = stats.poisson.pmf(np.arange(kmax + 1), lam)
    return DiscretePMF(p, float(stats.poisson.sf(kmax, lam)))


def binomial_pmf(n: int, p: float, tol: float = PMF_TOL) -> DiscretePMF:
    if not 0.0 <= p <= 1.0 or n < 0:
        raise ValueError("need n >= 0 and 0 <= p <= 1")
    kmax = min(int(n), int(stats.binom.isf(tol, n, p)) + 1)
    probs = stats.binom.pmf(np.arange(kmax + 1), n, p)
    return DiscretePMF(probs, float(stats.binom.sf(kmax, n, p)) if kmax < n else 0.0)


def tv_discrete(p: DiscretePMF, q: DiscretePMF) -> float:
    """Half the l1 distance; unresolved tail mass is counted in full (an upper bound)."""
    m = max(p.probs.size, q.probs.size)
    a = np.zeros(m)
    b = np.zeros(m)
    a[: p.probs.size] = p.probs
    b[: q.probs.size] = q.probs
    tv = 0.5 * math.fsum(np.abs(a - b)) + 0.5 * (p.tail_mass + q.tail_mass)
    return min(1.0, max(0.0, tv))


def tv_binomial_poisson(n: int, p: float) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    return tv_discrete(binomial_pmf(n, p), poisson_pmf(n * p))


def tv_poisson_poisson(l1: float, l2: float) -> float:
    if not (l1 > 0 and l2 > 0):
        raise ValueError("Poisson means must be positive")
    if l1 == l2:
        return 0.0
    lo, hi = sorted((l1, l2))
    # symmetric by construction: always compare in the same order
    return tv_discrete(poisson_pmf(lo), poisson_pmf(hi))


@dataclass(frozen=True, eq=False)
class EmpiricalSample:
    values: np.ndarray

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=np.float64).reshape(-1))
        if v.size == 0:
            raise ValueError("empty sample")
        if np.any(np.isnan(v)):
            raise ValueError("sample contains NaN")
        object.__setattr__(self, "values", v)

    @property
    def n_trials(self) -> int:
        return self.values.size

    def ecdf(self, t):
        out = np.searchsorted(self.values, np.asarray(t, dtype=np.float64), side="right") / self.n_trials
        return float(out) if np.ndim(out) == 0 else out


def d_K(sample: EmpiricalSample | np.ndarray, cdf: Callable) -> float:
    """Kolmogorov distance between the sample's step function and ``cdf``.

    Between jumps the step function is flat and ``cdf`` is monotone, so the
    supremum sits at a jump point, approached from the right or the left.
    """
    if not isinstance(sample, EmpiricalSample):
        sample = EmpiricalSample(sample)
    v, idx = np.unique(sample.values, return_index=True)
    n = sample.n_trials
    above = np.append(idx[1:], n) / n  # step value at v (right limit)
    below = idx / n  # step value just before v
    f_at = np.asarray(cdf(v), dtype=np.float64)
    f_left = np.asarray(cdf(np.nextafter(v, -np.inf)), dtype=np.float64)
    return float(max(np.max(np.abs(above - f_at)), np.max(np.abs(below - f_left))))


def empirical_pmf(counts) -> DiscretePMF:
    c = np.asarray(counts).reshape(-1)
    if c.size == 0:
        raise ValueError("empty sample")
    if np.any(c < 0) or np.any(c != np.floor(c)):
        raise ValueError("counts must be nonnegative integers")
    freq = np.bincount(c.astype(np.int64)) / c.size
    return DiscretePMF(freq)


def dkw_radius(n_trials: int, confidence: float) -> float:
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * n_trials))


def _tv_counts(a: np.ndarray, b: np.ndarray, m: int) -> float:
    pa = np.bincount(a, minlength=m) / a.size
    pb = np.bincount(b, minlength=m) / b.size
    return 0.5 * float(np.abs(pa - pb).sum())


def empirical_tv(a, b) -> float:
    return tv_discrete(empirical_pmf(a), empirical_pmf(b))


def tv_bootstrap_band(a, b, rng: RngStream, resamples: int = 500, level: float = 0.99) -> float:
    """``level`` quantile of the empirical TV when both samples come from one law.

    Both samples are redrawn with replacement from the pooled counts, so the
    band measures the finite-sample upward bias of the TV estimate.
    """
    a = np.asarray(a, dtype=np.int64).reshape(-1)
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    pooled = np.concatenate([a, b])
    m = int(pooled.max()) + 1
    gen = rng.generator
    tvs = np.empty(resamples)
    for r in range(resamples):
        tvs[r] = _tv_counts(gen.choice(pooled, a.size), gen.choice(pooled, b.size), m)
    return float(np.quantile(tvs, level))


def ks_uniform(values) -> tuple[float, float]:
    """Kolmogorov-Smirnov statistic and p-value against Uniform(0, 1)."""
    res = stats.kstest(np.asarray(values, dtype=np.float64), "uniform")
    return float(res.statistic), float(res.pvalue)


def _standard_ranks(x: np.ndarray) -> np.ndarray:
    r = stats.rankdata(x)
    r = r - r.mean()
    s = math.sqrt(float(np.dot(r, r)))
    if s == 0:
        raise ValueError("a coordinate is constant; correlation undefined")
    return r / s


def independence_test(pairs, permutations: int, rng: RngStream, min_pairs: int = 100) -> float:
    """Permutation p-value for |rank correlation| between the two coordinates.

    p = (1 + #{permuted statistics >= observed}) / (1 + permutations).
    """
    P = np.asarray(pairs, dtype=np.float64)
    if P.ndim != 2 or P.shape[1] != 2:
        raise ValueError("pairs must be an (m, 2) array")
    if P.shape[0] < min_pairs:
        raise ValueError(f"need at least {min_pairs} pairs, got {P.shape[0]}")
    x = _standard_ranks(P[:, 0])
    y = _standard_ranks(P[:, 1])
    observed = abs(float(np.dot(x, y)))
    gen = rng.generator
    # relative slack so exact ties with the observed value count as >=
    thresh = observed * (1 - 1e-12)
    hits = sum(abs(float(np.dot(x, gen.permutation(y)))) >= thresh for _ in range(permutations))
    return (1 + hits) / (1 + permutations)
