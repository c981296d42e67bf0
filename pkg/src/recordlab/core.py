"""Domain types, the dominance relation and random sampling primitives.

Observations live in the open positive orthant.  Randomness comes from
:class:`RngStream`, a counter-based Philox stream keyed by ``(seed, stream_id)``
so that every trial's draws are a pure function of its index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _philox

_U64 = (1 << 64) - 1


class DimensionError(ValueError):
    """Raised when points of different (or inadmissible) dimension meet."""


@dataclass(frozen=True)
class Point:
    """A vector of strictly positive finite coordinates.

    Observations need ``d >= 2``; pass ``min_dim=1`` for internal helpers.
    """

    coords: tuple[float, ...]

    def __init__(self, coords: Sequence[float], min_dim: int = 2):
        values = tuple(float(c) for c in coords)
        if len(values) < min_dim:
            raise DimensionError(f"point needs at least {min_dim} coordinates, got {len(values)}")
        for c in values:
            if not (c > 0.0 and math.isfinite(c)):
                raise ValueError(f"coordinates must be positive and finite, got {c!r}")
        object.__setattr__(self, "coords", values)

    @property
    def d(self) -> int:
        return len(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, j):
        return self.coords[j]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=np.float64)


def _coords(x) -> tuple[float, ...]:
    return x.coords if isinstance(x, Point) else tuple(float(c) for c in x)


def strictly_dominates(x, y) -> bool:
    """True iff every coordinate of ``x`` is strictly below that of ``y``."""
    a, b = _coords(x), _coords(y)
    if len(a) != len(b):
        raise DimensionError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return all(u < v for u, v in zip(a, b))


def l1_norm(x) -> float:
    return math.fsum(_coords(x))


@dataclass(frozen=True)
class GumbelLaw:
    location: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not (self.scale > 0.0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be positive, got {self.scale!r}")

    def cdf(self, x):
        return gumbel_cdf(self, x)

    def quantile(self, u):
        return gumbel_quantile(self, u)


def gumbel_cdf(law: GumbelLaw, x):
    z = (np.asarray(x, dtype=np.float64) - law.location) / law.scale
    with np.errstate(over="ignore"):
        out = np.exp(-np.exp(-z))
    return float(out) if out.ndim == 0 else out


def gumbel_quantile(law: GumbelLaw, u):
    u = np.asarray(u, dtype=np.float64)
    if np.any(~((u > 0.0) & (u < 1.0))):
        raise ValueError("gumbel_quantile needs 0 < u < 1")
    out = law.location - law.scale * np.log(-np.log(u))
    return float(out) if out.ndim == 0 else out


class RngStream:
    """Counter-based random stream; output depends only on ``(seed, stream_id, lane)``.

    ``lane`` occupies the top word of the 256-bit Philox counter, giving each
    stream 2**64 non-overlapping sub-streams.  The numba kernels in this
    package reproduce the same raw sequence from the same triple.
    """

    def __init__(self, seed: int, stream_id: int = 0, lane: int = 0):
        for name, v in (("seed", seed), ("stream_id", stream_id), ("lane", lane)):
            if not (0 <= int(v) <= _U64):
                raise ValueError(f"{name} must fit in 64 unsigned bits, got {v!r}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self.lane = int(lane)
        self._bitgen = np.random.Philox(
            key=np.array([self.seed, self.stream_id], dtype=np.uint64),
            counter=np.array([0, 0, 0, self.lane], dtype=np.uint64),
        )
        self.generator = np.random.Generator(self._bitgen)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}, lane={self.lane})"

    def sub(self, lane: int) -> "RngStream":
        """Fresh sub-stream with the same key; lanes never overlap."""
        return RngStream(self.seed, self.stream_id, lane)

    def raw(self, size: int) -> np.ndarray:
        return self._bitgen.random_raw(size)

    def uniform(self, size=None):
        """Uniforms on the open interval (0, 1)."""
        raw = self._bitgen.random_raw(1 if size is None else size)
        u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53
        return float(u[0]) if size is None else u

    def exponential(self, size=None):
        u = self.uniform(size)
        return -math.log(u) if size is None else -np.log(u)

    def kernel_state(self) -> np.ndarray:
        """Snapshot in the uint64[11] layout used by the numba kernels."""
        st = self._bitgen.state["state"]
        buf = self._bitgen.state["buffer"]
        pos = self._bitgen.state["buffer_pos"]
        out = np.empty(_philox.STATE_SIZE, dtype=np.uint64)
        out[0:2] = st["key"]
        out[2:6] = st["counter"]
        out[6:10] = buf
        out[10] = pos
        return out

    def load_kernel_state(self, state: np.ndarray) -> None:
        """Advance this stream to a state returned by a kernel."""
        full = self._bitgen.state
        full["state"]["key"] = state[0:2].copy()
        full["state"]["counter"] = state[2:6].copy()
        full["buffer"] = state[6:10].copy()
        full["buffer_pos"] = int(state[10])
        full["has_uint32"] = 0
        full["uinteger"] = 0
        self._bitgen.state = full


def _check_dim(d: int) -> None:
    if int(d) != d or d < 2:
        raise DimensionError(f"dimension must be an integer >= 2, got {d!r}")


def sample_exponential_point(d: int, rng: RngStream) -> Point:
    """One Model-E observation: ``d`` i.i.d. Exponential(1) coordinates."""
    _check_dim(d)
    return Point(rng.exponential(d))


def sample_simplex_uniform(d: int, rng: RngStream) -> Point:
    """Uniform point on the probability simplex (normalised exponentials)."""
    _check_dim(d)
    e = rng.exponential(d)
    return Point(e / e.sum())


def exponential_points(n: int, d: int, rng: RngStream) -> np.ndarray:
    """``(n, d)`` array of Model-E observations."""
    _check_dim(d)
    return rng.exponential(n * d).reshape(n, d)


def simplex_points(n: int, d: int, rng: RngStream) -> np.ndarray:
    """``(n, d)`` array of uniform simplex points."""
    _check_dim(d)
    e = rng.exponential(n * d).reshape(n, d)
    return e / e.sum(axis=1, keepdims=True)
