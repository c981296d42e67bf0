"""Boundary sequences around ln n, the normalised minimum norm and its limit law.

Notation: ``L1 = ln n``, ``L2 = ln ln n``, ``L3 = ln ln ln n``, ``L4 = ln L3``.
``n`` may be a Python int of any size (``math.log`` handles big integers), so
the analytic side works far beyond the simulable range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from ._kernels import log_gamma_tail
from .core import GumbelLaw

MIN_EPOCH = 16  # first integer with ln ln ln n > 0

OmegaRule = Union[str, float, Callable[[float, int], float]]
OMEGA_RULES = ("default", "sqrt-l3", "l4")


class BoundaryError(ValueError):
    pass


@dataclass(frozen=True)
class IteratedLogs:
    l1: float
    l2: float
    l3: float
    l4: float


def iterated_logs(n) -> IteratedLogs:
    if n < MIN_EPOCH:
        raise BoundaryError(f"n = {n} is below admissible epoch {MIN_EPOCH}")
    l1 = math.log(n)
    l2 = math.log(l1)
    l3 = math.log(l2)
    if not l3 > 0.0:
        raise BoundaryError(f"n = {n} is below admissible epoch {MIN_EPOCH}")
    return IteratedLogs(l1, l2, l3, math.log(l3))


def omega_n(n, d: int, rule: OmegaRule = "default", kappa: float = 2.0) -> float:
    """Inner-boundary growth sequence.

    ``"default"``: (d-1) max(e + L3, 2 exp(a_n / L2)).  It grows without
    bound, ln of it is o(L3), and it keeps the inner boundary below b*_n(a)
    for every |a| <= a_n.  The second term only matters for n below ~1e3,
    where a_n / L2 is large.
    ``"sqrt-l3"``: max(1.05, sqrt(L3)).  ``"l4"``: max(1.05, kappa * L4).
    A float is used as a constant; a callable gets ``(n, d)``.
    """
    if callable(rule):
        w = float(rule(n, d))
    elif isinstance(rule, (int, float)) and not isinstance(rule, bool):
        w = float(rule)
    else:
        lg = iterated_logs(n)
        if rule == "default":
            w = (d - 1) * max(math.e + lg.l3, 2.0 * math.exp(a_n(n, d) / lg.l2))
        elif rule == "sqrt-l3":
            w = max(1.05, math.sqrt(lg.l3))
        elif rule == "l4":
            w = max(1.05, kappa * lg.l4)
        else:
            raise ValueError(f"unknown omega rule {rule!r}; choose from {OMEGA_RULES}, a number or a callable")
    if not (w > 0.0 and math.isfinite(w)):
        raise ValueError(f"omega must be positive and finite, got {w!r}")
    return w


def parse_omega_rule(text: str) -> OmegaRule:
    text = text.strip()
    if text in OMEGA_RULES:
        return text
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"unknown omega rule {text!r}; choose from {OMEGA_RULES} or a number") from None


def _check_a(a: float, lg: IteratedLogs) -> None:
    if not (1.0 - a / lg.l2 > 0.0):
        raise BoundaryError(f"log argument nonpositive: a = {a} must be below ln ln n = {lg.l2}")


def b_star(n, a: float, d: int) -> float:
    lg = iterated_logs(n)
    return lg.l1 - lg.l3 - math.log(d - 1) + a / lg.l2


def b_n(n, a: float, d: int) -> float:
    lg = iterated_logs(n)
    _check_a(a, lg)
    return lg.l1 - lg.l3 - math.log(d - 1) - math.log1p(-a / lg.l2)


def a_n(n, d: int) -> float:
    lg = iterated_logs(n)
    return (lg.l3 - 2.0 * lg.l4) / (2.0 * (d - 1))


def b_lower(n, d: int, omega_rule: OmegaRule = "default") -> float:
    lg = iterated_logs(n)
    return lg.l1 - lg.l3 - math.log(omega_n(n, d, omega_rule))


def b_upper(n, d: int) -> float:
    lg = iterated_logs(n)
    return lg.l1 + 2.0 * (d - 1) * lg.l2


def lambda_of(a: float, d: int) -> float:
    return math.exp((d - 1) * a) / math.factorial(d - 1)


def limit_survival(a, d: int):
    """exp(-lambda(a)), the limiting P(phi_circ > a)."""
    z = np.exp((d - 1) * np.asarray(a, dtype=np.float64) - math.lgamma(d))
    out = np.exp(-z)
    return float(out) if out.ndim == 0 else out


def limit_cdf(x, d: int):
    """Limiting distribution function of phi_circ."""
    z = np.exp((d - 1) * np.asarray(x, dtype=np.float64) - math.lgamma(d))
    out = -np.expm1(-z)
    return float(out) if out.ndim == 0 else out


def gumbel_limit_law(d: int) -> GumbelLaw:
    """Law of G, where phi_circ converges to -G."""
    return GumbelLaw(-math.lgamma(d) / (d - 1), 1.0 / (d - 1))


def phi_circ(phi, n, d: int):
    lg = iterated_logs(n)
    out = lg.l2 * (np.asarray(phi, dtype=np.float64) - (lg.l1 - lg.l3 - math.log(d - 1)))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ShellBoundaries:
    n: int
    d: int
    a: float
    b_star: float
    b: float
    b_lower: float
    omega: float
    b_upper: float
    a_n: float
    lam: float
    c_n: float
    epsilon_n: float
    logs: IteratedLogs

    @property
    def beta(self) -> float:
        """n e^{-b} = c_n L2."""
        return self.c_n * self.logs.l2

    @property
    def beta_lower(self) -> float:
        """n e^{-b_lower} = omega L2."""
        return self.omega * self.logs.l2

    @property
    def h_hat(self) -> float:
        """P(Gamma(d) > b_upper - b): sup of the conditioning correction on the shell."""
        return math.exp(log_gamma_tail(self.d, self.b_upper - self.b))


def shell(n, a: float, d: int, omega_rule: OmegaRule = "default") -> ShellBoundaries:
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")
    lg = iterated_logs(n)
    _check_a(a, lg)
    b = b_n(n, a, d)
    bu = b_upper(n, d)
    return ShellBoundaries(
        n=n,
        d=d,
        a=float(a),
        b_star=b_star(n, a, d),
        b=b,
        b_lower=b_lower(n, d, omega_rule),
        omega=omega_n(n, d, omega_rule),
        b_upper=bu,
        a_n=a_n(n, d),
        lam=lambda_of(a, d),
        c_n=(d - 1) * (1.0 - a / lg.l2),
        epsilon_n=bu / b - 1.0,
        logs=lg,
    )


def resolve_a(token, n, d: int) -> float:
    """Numeric offset from a number or one of ``a_n``, ``-a_n``, ``+a_n``."""
    if isinstance(token, (int, float)):
        return float(token)
    t = str(token).strip().replace(" ", "")
    if t in ("a_n", "+a_n", "an", "+an"):
        return a_n(n, d)
    if t in ("-a_n", "-an"):
        return -a_n(n, d)
    return float(t)
