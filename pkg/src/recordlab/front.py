"""Maxima (Pareto records) of a sample and the statistics read off them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .core import DimensionError, Point, l1_norm, strictly_dominates


def _as_matrix(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        P = np.asarray(points, dtype=np.float64)
        if P.ndim != 2:
            raise DimensionError("expected an (n, d) array of points")
    else:
        rows = [p.coords if isinstance(p, Point) else tuple(p) for p in points]
        if not rows:
            raise ValueError("empty sample")
        dims = {len(r) for r in rows}
        if len(dims) != 1:
            raise DimensionError(f"mixed dimensions in sample: {sorted(dims)}")
        P = np.asarray(rows, dtype=np.float64)
    if P.shape[0] == 0:
        raise ValueError("empty sample")
    if P.shape[1] < 1:
        raise DimensionError("points need at least one coordinate")
    return P


@dataclass(frozen=True, eq=False)
class ParetoFront:
    """Mutually non-dominated points, kept in increasing-norm order."""

    points: tuple[Point, ...]
    d: int

    @classmethod
    def _from_matrix(cls, P: np.ndarray) -> "ParetoFront":
        norms = P.sum(axis=1)
        # increasing norm, ties broken lexicographically (deterministic order)
        order = np.lexsort(tuple(P[:, j] for j in range(P.shape[1] - 1, -1, -1)) + (norms,))
        pts = tuple(Point(P[i], min_dim=1) for i in order)
        return cls(pts, P.shape[1])

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p) -> bool:
        c = p.coords if isinstance(p, Point) else tuple(float(v) for v in p)
        return any(q.coords == c for q in self.points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ParetoFront):
            return NotImplemented
        return self.d == other.d and self.coord_set() == other.coord_set()

    def __hash__(self):
        return hash((self.d, self.coord_set()))

    def coord_set(self) -> frozenset:
        return frozenset(p.coords for p in self.points)

    def as_array(self) -> np.ndarray:
        return np.array([p.coords for p in self.points], dtype=np.float64).reshape(-1, self.d)

    def norms(self) -> np.ndarray:
        return np.array([l1_norm(p) for p in self.points])


def front_offline(points: Sequence[Point] | np.ndarray) -> ParetoFront:
    """The non-dominated subset of ``points`` (as a set; input order is irrelevant)."""
    P = _as_matrix(points)
    idx = _kernels.front_indices(P)
    return ParetoFront._from_matrix(P[idx])


def front_brute(points: Sequence[Point] | np.ndarray) -> ParetoFront:
    """O(n^2) pairwise oracle for :func:`front_offline`."""
    P = _as_matrix(points)
    return ParetoFront._from_matrix(P[_kernels.brute_front_mask(P)])


def front_insert(front: ParetoFront | None, p) -> ParetoFront:
    """Front of (previous points + p), built from the current front only."""
    p = p if isinstance(p, Point) else Point(p, min_dim=1)
    if front is None or len(front) == 0:
        return ParetoFront((p,), p.d)
    if p.d != front.d:
        raise DimensionError(f"dimension mismatch: front has d={front.d}, point has d={p.d}")
    if any(strictly_dominates(p, q) for q in front.points):
        return front
    kept = [q for q in front.points if not strictly_dominates(q, p)]
    if p.coords not in {q.coords for q in kept}:
        kept.append(p)
    return ParetoFront._from_matrix(np.array([q.coords for q in kept], dtype=np.float64))


def front_fold(points: Iterable) -> ParetoFront | None:
    front = None
    for p in points:
        front = front_insert(front, p)
    return front


def rho(front: ParetoFront, b: float) -> int:
    """Number of maxima with l1-norm at most ``b``."""
    if b <= 0:
        return 0
    return int(np.count_nonzero(front.norms() <= b))


@dataclass(frozen=True)
class RecordStats:
    phi: float
    f_plus: float
    count: int
    sigma: Point
    sigma_direction: Point
    # the largest-norm maximum and its direction
    top: Point
    top_direction: Point


def _lex_key(p: Point):
    return (l1_norm(p), p.coords)


def record_stats(front: ParetoFront) -> RecordStats:
    if front is None or len(front) == 0:
        raise ValueError("record statistics need a nonempty front")
    sigma = min(front.points, key=_lex_key)
    top = max(front.points, key=lambda p: (l1_norm(p), tuple(-c for c in p.coords)))
    phi = l1_norm(sigma)
    f_plus = l1_norm(top)
    return RecordStats(
        phi=phi,
        f_plus=f_plus,
        count=len(front),
        sigma=sigma,
        sigma_direction=Point([c / phi for c in sigma.coords], min_dim=1),
        top=top,
        top_direction=Point([c / f_plus for c in top.coords], min_dim=1),
    )


def smallest_max_density_n2(s) -> float:
    """Density at ``s`` of the smallest-norm maximum of two Model-E points."""
    c = s.coords if isinstance(s, Point) else tuple(float(v) for v in s)
    if any(not (v > 0.0) for v in c):
        raise ValueError("density is defined on the open positive orthant")
    d = len(c)
    r = math.fsum(c)
    prod = 1.0
    for v in c:
        prod *= -math.expm1(-v)
    poly = 0.0
    term = 1.0
    for j in range(1, d):
        term *= r / j
        poly += term
    return 2.0 * math.exp(-r) * (prod + math.exp(-r) * poly)
