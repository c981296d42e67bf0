"""Batch Monte-Carlo drivers.

Trial ``t`` always draws from the stream keyed ``(seed, t)`` on a fixed lane,
so splitting trials over worker processes changes nothing but wall-clock.
"""

from __future__ import annotations

import math
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels

ENGINES = {"tail": _kernels.ENGINE_TAIL, "stream": _kernels.ENGINE_STREAM}

_U64 = (1 << 64) - 1


def _u64(v: int) -> np.uint64:
    v = int(v)
    if not 0 <= v <= _U64:
        raise ValueError(f"value must fit in 64 unsigned bits, got {v}")
    return np.uint64(v)


def _chunks(trials: int, workers: int, t0: int):
    pieces = max(1, min(trials, workers * 4))
    bounds = np.linspace(0, trials, pieces + 1).astype(np.int64)
    return [(t0 + int(a), int(b - a)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _call(name, args):
    return getattr(_kernels, name)(*args)


def _run(name, make_args, trials: int, t0: int, workers: int):
    """Run kernel ``name`` over trial blocks; results concatenated in trial order."""
    workers = max(1, int(workers))
    blocks = _chunks(trials, workers, t0)
    if workers == 1 or len(blocks) == 1:
        parts = [_call(name, make_args(a, m)) for a, m in blocks]
    else:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=min(workers, len(blocks)), mp_context=ctx) as ex:
            futs = [ex.submit(_call, name, make_args(a, m)) for a, m in blocks]
            parts = [f.result() for f in futs]
    if not parts:
        raise ValueError("no trials requested")
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate([p[i] for p in parts]) for i in range(len(parts[0])))
    return np.concatenate(parts)


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)


@dataclass
class ModelEBatch:
    """Per-trial record statistics of independent Model-E samples."""

    n: int
    d: int
    phi: np.ndarray
    f_plus: np.ndarray
    count: np.ndarray
    sigma: np.ndarray
    top: np.ndarray
    b_grid: np.ndarray
    rho: np.ndarray  # rho[t, g] = number of maxima with norm <= b_grid[g]

    @property
    def trials(self) -> int:
        return self.phi.shape[0]

    def rho_at(self, b: float) -> np.ndarray:
        hit = np.nonzero(self.b_grid == b)[0]
        if hit.size == 0:
            raise KeyError(f"b = {b!r} was not on the simulated grid")
        return self.rho[:, hit[0]]


def simulate_model_e(n: int, d: int, trials: int, seed: int, *, b_grid=(), engine: str = "tail",
                     workers: int = 1, t0: int = 0, lane: int = _kernels.LANE_MODEL_E) -> ModelEBatch:
    """Record statistics of ``trials`` independent samples of size ``n``.

    ``engine="tail"`` generates points from the largest norm down and stops
    once the front provably cannot change; ``engine="stream"`` draws all n
    points.  Both are exact, but they consume randomness differently and so
    give different (equally distributed) samples for the same seed.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; choose from {sorted(ENGINES)}")
    if int(n) < 1 or int(d) < 2 or int(trials) < 1:
        raise ValueError("need n >= 1, d >= 2 and trials >= 1")
    if engine == "stream" and n > 10**9:
        raise ValueError("the streaming engine is limited to n <= 1e9")
    b = np.ascontiguousarray(np.asarray(b_grid, dtype=np.float64).reshape(-1))
    eng = ENGINES[engine]
    seed64 = _u64(seed)

    def args(a, m):
        return (int(n), int(d), seed64, a, m, b, eng, _u64(lane))

    phi, fplus, count, sigma, top, rho = _run("batch_model_e", args, int(trials), int(t0), workers)
    return ModelEBatch(int(n), int(d), phi, fplus, count, sigma, top, b, rho)


def simulate_small_n(n: int, d: int, trials: int, seed: int, *, workers: int = 1, t0: int = 0,
                     lane: int = _kernels.LANE_MISC):
    """Direct simulation with the O(n^2) front oracle (small n only).

    Returns (front size, smallest-norm maximum, largest-norm maximum).
    """
    if not 1 <= int(n) <= 5000:
        raise ValueError("small-n driver is meant for 1 <= n <= 5000")
    seed64 = _u64(seed)

    def args(a, m):
        return (int(n), int(d), seed64, a, m, _u64(lane))

    return _run("batch_small_n", args, int(trials), int(t0), workers)


def simulate_shell_counts(n: int, lo: float, hi: float, d: int, windows, trials: int, seed: int, *,
                          workers: int = 1, t0: int = 0, lane: int = _kernels.LANE_SHELL):
    """Window maxima counts of independent shell processes.

    Returns (counts[t, w], total points[t]).
    """
    W = np.ascontiguousarray(np.asarray(windows, dtype=np.float64).reshape(-1, 2))
    seed64 = _u64(seed)

    def args(a, m):
        return (float(n), float(lo), float(hi), int(d), W, seed64, a, m, _u64(lane))

    return _run("batch_shell_counts", args, int(trials), int(t0), workers)


def simulate_nu_min(n: int, lo: float, hi: float, d: int, trials: int, seed: int, *,
                    workers: int = 1, t0: int = 0, lane: int = _kernels.LANE_NU):
    """Smallest point of the thinned process per trial: (found, norm, point)."""
    seed64 = _u64(seed)

    def args(a, m):
        return (float(n), float(lo), float(hi), int(d), seed64, a, m, _u64(lane))

    return _run("batch_nu_min", args, int(trials), int(t0), workers)


def auto_trials(requested: int, n: int, budget: float = 1e10) -> int:
    """Cap trials so that one command samples at most ``budget`` points."""
    return max(1, min(int(requested), int(math.floor(budget / max(1, n)))))
