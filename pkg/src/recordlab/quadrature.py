"""Adaptive Simpson quadrature.

Intervals are refined level by level: every still-active interval is bisected
at once, so the integrand is called on whole numpy arrays rather than one
point at a time.  An interval is accepted when the two-halves Simpson value
agrees with the one-panel value to within its share of the tolerance; the
accepted value carries the usual Richardson correction (difference / 15).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

ABS_TOL = 1e-10
REL_TOL = 1e-10


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    intervals: int
    converged: bool

    def __float__(self):
        return self.value


def adaptive_simpson(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, *,
                     abs_tol: float = ABS_TOL, rel_tol: float = REL_TOL,
                     breakpoints: Sequence[float] = (), initial: int = 16,
                     max_intervals: int = 400_000, max_depth: int = 50) -> QuadResult:
    """Integral of a vectorised ``f`` over the finite interval [a, b]."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("adaptive_simpson needs finite limits; see integrate_to_infinity")
    if b == a:
        return QuadResult(0.0, 0.0, 0, True)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    cuts = sorted({a, b, *(x for x in breakpoints if a < x < b)})
    edges = np.concatenate([np.linspace(lo, hi, initial + 1)[:-1] for lo, hi in zip(cuts[:-1], cuts[1:])] + [[b]])
    lo = edges[:-1]
    hi = edges[1:]
    mid = 0.5 * (lo + hi)
    flo = np.asarray(f(lo), dtype=np.float64)
    fmid = np.asarray(f(mid), dtype=np.float64)
    fhi = np.asarray(f(hi), dtype=np.float64)
    whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
    width = b - a
    done_vals: list[np.ndarray] = []
    done_errs: list[np.ndarray] = []
    converged = True
    n_int = lo.size
    depth = 0
    while lo.size:
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm = np.asarray(f(lm), dtype=np.float64)
        frm = np.asarray(f(rm), dtype=np.float64)
        h = (hi - lo) / 12.0
        left = h * (flo + 4.0 * flm + fmid)
        right = h * (fmid + 4.0 * frm + fhi)
        diff = left + right - whole
        total = math.fsum(x.sum() for x in done_vals) + float((left + right).sum())
        tol = max(abs_tol, rel_tol * abs(total))
        share = tol * (hi - lo) / width
        ok = np.abs(diff) <= 15.0 * share
        depth += 1
        if depth >= max_depth or n_int + 2 * np.count_nonzero(~ok) > max_intervals:
            converged = bool(np.all(ok))
            ok[:] = True
        if np.any(ok):
            done_vals.append(left[ok] + right[ok] + diff[ok] / 15.0)
            done_errs.append(np.abs(diff[ok]) / 15.0)
        keep = ~ok
        if not np.any(keep):
            break
        lo_k, mid_k, hi_k = lo[keep], mid[keep], hi[keep]
        lo = np.concatenate([lo_k, mid_k])
        hi = np.concatenate([mid_k, hi_k])
        flo = np.concatenate([flo[keep], fmid[keep]])
        fhi = np.concatenate([fmid[keep], fhi[keep]])
        fmid = np.concatenate([flm[keep], frm[keep]])
        mid = np.concatenate([lm[keep], rm[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        n_int += lo.size // 2
    value = math.fsum(np.concatenate(done_vals)) if done_vals else 0.0
    err = float(np.sum(np.concatenate(done_errs))) if done_errs else 0.0
    return QuadResult(sign * value, err, n_int, converged)


def tail_cutoff(f: Callable[[np.ndarray], np.ndarray], start: float, *, step: float = 1.0,
                ratio: float = 1e-18, limit: float = 1e6) -> float:
    """Point beyond ``start`` after which ``f`` stays below ``ratio`` x its peak.

    Intended for integrands that are unimodal with a decaying tail.
    """
    x = start
    peak = abs(float(f(np.array([x]))[0]))
    s = step
    while x < start + limit:
        nxt = x + s
        v = abs(float(f(np.array([nxt]))[0]))
        peak = max(peak, v)
        if peak > 0.0 and v < ratio * peak and nxt - start > 2 * step:
            return nxt
        x = nxt
        s = min(s * 1.5, 4.0 * step)
    return start + limit


def integrate_to_infinity(f: Callable[[np.ndarray], np.ndarray], a: float, *, step: float = 1.0,
                          ratio: float = 1e-18, breakpoints: Sequence[float] = (), **kw) -> QuadResult:
    """Integral over [a, inf) with the tail cut where ``f`` drops below ``ratio`` x peak."""
    cut = tail_cutoff(f, a, step=step, ratio=ratio)
    return adaptive_simpson(f, a, cut, breakpoints=breakpoints, **kw)
