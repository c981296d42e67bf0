"""Experiments behind the command line: each returns report rows (and, when
asked, raw per-trial tables) and never touches the filesystem."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate

from . import _kernels
from . import analytics as an
from . import boundaries as bd
from . import distances as ds
from . import poisson_lab as pl
from .core import RngStream
from .simulate import auto_trials, simulate_model_e, simulate_shell_counts

PASS, FAIL, REPORT = "pass", "fail", "report-only"


@dataclass
class SimConfig:
    d: int = 2
    n_grid: list = field(default_factory=lambda: [10**6])
    a_grid: list = field(default_factory=lambda: ["0"])
    trials: list = field(default_factory=lambda: [1000])
    seed: int = 0
    omega_rule: bd.OmegaRule = "default"
    workers: int = 1
    output_dir: str = "results"
    engine: str = "tail"
    budget: float = 1e10
    raw: bool = False

    def trials_for(self, i: int) -> int:
        t = self.trials[i] if len(self.trials) > 1 else self.trials[0]
        if len(self.trials) > 1 and len(self.trials) != len(self.n_grid):
            raise ValueError("--trials list must have one entry per n or a single entry")
        n = self.n_grid[i]
        # only the streaming engine draws all n points of a trial
        return auto_trials(t, n, self.budget) if self.engine == "stream" else int(t)


@dataclass(frozen=True)
class ReportRow:
    experiment: str
    n: int
    d: int
    a: float
    statistic: str
    value: float
    se_or_band: float
    bound_or_target: float
    rule: str
    status: str

    def __post_init__(self):
        if self.status not in (PASS, FAIL, REPORT):
            raise ValueError(f"bad status {self.status!r}")

    def sort_key(self):
        return (self.experiment, self.n, self.a, self.statistic, self.rule)


@dataclass
class RawTable:
    name: str
    columns: dict  # column name -> 1-d array, all the same length


@dataclass
class Outcome:
    rows: list
    raw: list = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return any(r.status == FAIL for r in self.rows)


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


def _block(i: int) -> int:
    """Trial-index offset for the i-th parameter set, so sets never share streams."""
    return i << 40


def _grid(cfg: SimConfig):
    """(index, n, a) over the n x a grid, with symbolic a resolved per n."""
    k = 0
    for i, n in enumerate(cfg.n_grid):
        for tok in cfg.a_grid:
            yield k, i, n, bd.resolve_a(tok, n, cfg.d)
            k += 1


# --------------------------------------------------------------------------

def run_simulate(cfg: SimConfig) -> Outcome:
    rows, raw = [], []
    for i, n in enumerate(cfg.n_grid):
        T = cfg.trials_for(i)
        b = simulate_model_e(n, cfg.d, T, cfg.seed, engine=cfg.engine, workers=cfg.workers, t0=_block(i))
        cols = {"trial": np.arange(T), "n": np.full(T, n), "phi": b.phi, "f_plus": b.f_plus, "count": b.count}
        for j in range(cfg.d):
            cols[f"sigma_dir_{j}"] = b.sigma[:, j] / b.phi
        for j in range(cfg.d):
            cols[f"top_dir_{j}"] = b.top[:, j] / b.f_plus
        raw.append(RawTable(f"model-e n={n}", cols))
        target = an.expected_rho(n, math.inf, cfg.d)
        se = float(b.count.std(ddof=1) / math.sqrt(T)) if T > 1 else math.nan
        mean = float(b.count.mean())
        rows.append(ReportRow("simulate", n, cfg.d, 0.0, "mean-count", mean, se, target, "|mean-Erho|<=4se",
                              _status(T > 1 and abs(mean - target) <= 4 * se)))
        rows.append(ReportRow("simulate", n, cfg.d, 0.0, "mean-phi", float(b.phi.mean()),
                              float(b.phi.std(ddof=1) / math.sqrt(T)) if T > 1 else math.nan, math.nan,
                              "reported", REPORT))
    return Outcome(rows, raw)


def run_gumbel_check(cfg: SimConfig) -> Outcome:
    rows, raw = [], []
    values = []
    for i, n in enumerate(cfg.n_grid):
        T = cfg.trials_for(i)
        b = simulate_model_e(n, cfg.d, T, cfg.seed, engine=cfg.engine, workers=cfg.workers, t0=_block(i))
        x = bd.phi_circ(b.phi, n, cfg.d)
        dk = ds.d_K(x, lambda t: bd.limit_cdf(t, cfg.d))
        values.append(dk)
        rows.append(ReportRow("gumbel-check", n, cfg.d, 0.0, "dK", dk, ds.dkw_radius(T, 0.999), 0.0,
                              "reported", REPORT))
        if cfg.raw:
            raw.append(RawTable(f"phi_circ n={n}", {"trial": np.arange(T), "n": np.full(T, n), "phi_circ": x}))
    if len(values) >= 2:
        finite = all(math.isfinite(v) for v in values)
        ok = finite and values[-1] < values[0]
        monotone = all(b < a for a, b in zip(values, values[1:]))
        rows.append(ReportRow("gumbel-trend", cfg.n_grid[-1], cfg.d, 0.0, "dK-last-minus-first",
                              values[-1] - values[0], 0.0, 0.0, "dK(n_last)<dK(n_first)", _status(ok)))
        rows.append(ReportRow("gumbel-trend", cfg.n_grid[-1], cfg.d, 0.0, "monotone-steps",
                              float(monotone), 0.0, 1.0, "dK decreasing at every step", REPORT))
    return Outcome(rows, raw)


def poissonization_data(n, a: float, d: int, trials: int, seed: int, *, omega_rule="default",
                        workers: int = 1, t0: int = 0):
    """Per-trial counts for the Poisson chain at one (n, a).

    Returns a dict with
      ``rho_window``: rho(b_n) - rho(b_lower) from Model-E samples,
      ``rho_b``: rho(b_n) from the same samples,
      ``N``: window maxima of the shell process on (b_lower, b_upper + FAR_MARGIN],
      ``Nbar``: window maxima of the shell process on (b_lower, b_upper].
    """
    sb = bd.shell(n, a, d, omega_rule)
    mb = simulate_model_e(n, d, trials, seed, b_grid=[sb.b_lower, sb.b], workers=workers, t0=t0)
    win = [[sb.b_lower, sb.b]]
    N, _ = simulate_shell_counts(n, sb.b_lower, sb.b_upper + pl.FAR_MARGIN, d, win, trials, seed,
                                 workers=workers, t0=t0, lane=_kernels.LANE_SHELL)
    Nbar, _ = simulate_shell_counts(n, sb.b_lower, sb.b_upper, d, win, trials, seed,
                                    workers=workers, t0=t0, lane=_kernels.LANE_SHELL_ALT)
    return {
        "rho_window": mb.rho[:, 1] - mb.rho[:, 0],
        "rho_b": mb.rho[:, 1],
        "N": N[:, 0],
        "Nbar": Nbar[:, 0],
        "shell": sb,
    }


def run_poisson_check(cfg: SimConfig) -> Outcome:
    rows, raw = [], []
    for k, i, n, a in _grid(cfg):
        T = cfg.trials_for(i)
        data = poissonization_data(n, a, cfg.d, T, cfg.seed, omega_rule=cfg.omega_rule,
                                   workers=cfg.workers, t0=_block(k))
        sb = data["shell"]
        boot = RngStream(cfg.seed, k, _kernels.LANE_MISC)
        pn = an.p_n(n, cfg.d, cfg.omega_rule)
        tv1 = ds.empirical_tv(data["rho_window"], data["N"])
        band1 = ds.tv_bootstrap_band(data["rho_window"], data["N"], boot)
        rows.append(ReportRow("poisson-check", n, cfg.d, a, "tv-poissonization", tv1, band1, 2 * pn,
                              "tv<=2pn+band", _status(tv1 <= 2 * pn + band1)))
        pe = pl.prob_En(n, cfg.d)
        tv2 = ds.empirical_tv(data["N"], data["Nbar"])
        band2 = ds.tv_bootstrap_band(data["N"], data["Nbar"], boot)
        rows.append(ReportRow("poisson-check", n, cfg.d, a, "tv-conditioning", tv2, band2, pe,
                              "tv<=PEn+band", _status(tv2 <= pe + band2)))
        tv3 = ds.tv_discrete(ds.empirical_pmf(data["rho_b"]), ds.poisson_pmf(sb.lam))
        rows.append(ReportRow("poisson-check", n, cfg.d, a, "tv-rho-vs-poisson-lambda", tv3, 0.0, 0.0,
                              "reported", REPORT))
        if cfg.raw:
            raw.append(RawTable(f"counts n={n} a={a}", {
                "trial": np.arange(T), "n": np.full(T, n), "a": np.full(T, a),
                "rho_window": data["rho_window"], "rho_b": data["rho_b"], "N": data["N"], "Nbar": data["Nbar"]}))
    return Outcome(rows, raw)


def run_mean_check(cfg: SimConfig) -> Outcome:
    rows, raw = [], []
    d = cfg.d
    for k, i, n, a in _grid(cfg):
        T = cfg.trials_for(i)
        sb = bd.shell(n, a, d, cfg.omega_rule)
        mb = simulate_model_e(n, d, T, cfg.seed, b_grid=[sb.b_star], workers=cfg.workers, t0=_block(k))
        x = mb.rho[:, 0]
        m, se = float(x.mean()), float(x.std(ddof=1) / math.sqrt(T))
        target = an.expected_rho(n, sb.b_star, d)
        rows.append(ReportRow("mean-check", n, d, a, "rho-at-bstar", m, se, target, "|mean-Erho|<=3se",
                              _status(abs(m - target) <= 3 * se)))
        nb = pl.shell_count_batch(n, a, d, T, cfg.seed, conditioned=True, omega_rule=cfg.omega_rule,
                                  workers=cfg.workers, t0=_block(k))
        m2, se2 = float(nb.mean()), float(nb.std(ddof=1) / math.sqrt(T))
        br = an.expected_Nbar_bracket(n, a, d, cfg.omega_rule)
        rows.append(ReportRow("mean-check", n, d, a, "nbar-mean-lo", m2, se2, br.lo, "bracket-3se<=mean<=bracket+3se",
                              _status(br.contains(m2, 3 * se2))))
        rows.append(ReportRow("mean-check", n, d, a, "nbar-mean-hi", m2, se2, br.hi, "bracket-3se<=mean<=bracket+3se",
                              _status(br.contains(m2, 3 * se2))))
        if cfg.raw:
            raw.append(RawTable(f"counts n={n} a={a}", {"trial": np.arange(T), "n": np.full(T, n),
                                                          "a": np.full(T, a), "rho_bstar": x, "Nbar": nb}))
    return Outcome(rows, raw)


def simulate_sigma2(d: int, trials: int, rng: RngStream, chunk: int = 1_000_000) -> np.ndarray:
    """Norms of the smallest-norm maximum of two Model-E points, directly."""
    out = []
    left = trials
    while left > 0:
        m = min(chunk, left)
        X = rng.exponential(m * d).reshape(m, d)
        Y = rng.exponential(m * d).reshape(m, d)
        x, y = X.sum(axis=1), Y.sum(axis=1)
        x_dom = np.all(X < Y, axis=1)  # X dominated: only Y is a maximum
        y_dom = np.all(Y < X, axis=1)
        out.append(np.where(x_dom, y, np.where(y_dom, x, np.minimum(x, y))))
        left -= m
    return np.concatenate(out)


def sigma2_nquad_mass(d: int) -> float:
    """Total mass of the n = 2 smallest-maximum density by iterated quadrature in R^d."""
    from .front import smallest_max_density_n2

    f = lambda *s: smallest_max_density_n2(s)  # noqa: E731
    val, _ = integrate.nquad(f, [[0, 60]] * d, opts={"epsabs": 1e-11, "epsrel": 1e-11, "limit": 200})
    return float(val)


def run_smallest2_check(cfg: SimConfig) -> Outcome:
    rows, raw = [], []
    d = cfg.d
    T = int(cfg.trials[0])
    mass = an.sigma2_density_integral(d)
    rows.append(ReportRow("smallest2-check", 2, d, 0.0, "radial-mass", mass, 1e-6, 1.0, "|mass-1|<=1e-6",
                          _status(abs(mass - 1) <= 1e-6)))
    if d <= 3:
        mass2 = sigma2_nquad_mass(d)
        rows.append(ReportRow("smallest2-check", 2, d, 0.0, "orthant-mass", mass2, 1e-6, 1.0, "|mass-1|<=1e-6",
                              _status(abs(mass2 - 1) <= 1e-6)))
    law = an.Sigma2NormLaw(d)
    x = simulate_sigma2(d, T, RngStream(cfg.seed, 0, _kernels.LANE_MISC))
    dk = ds.d_K(x, law.cdf)
    r = ds.dkw_radius(T, 0.999)
    rows.append(ReportRow("smallest2-check", 2, d, 0.0, "dK-norm-vs-quadrature", dk, r, r, "dK<=DKW(0.999)",
                          _status(dk <= r)))
    if cfg.raw:
        raw.append(RawTable("sigma2 norms", {"trial": np.arange(T), "norm": x}))
    return Outcome(rows, raw)


def simplex_first_coordinate_pit(directions: np.ndarray) -> np.ndarray:
    """First coordinate of a uniform simplex point is Beta(1, d-1); map it to Uniform(0, 1)."""
    d = directions.shape[1]
    return -np.expm1((d - 1) * np.log1p(-directions[:, 0]))


def run_conjecture(cfg: SimConfig, permutations: int = 1999) -> Outcome:
    rows = []
    d = cfg.d
    for i, n in enumerate(cfg.n_grid):
        T = cfg.trials_for(i)
        b = simulate_model_e(n, d, T, cfg.seed, workers=cfg.workers, t0=_block(i))
        rng = RngStream(cfg.seed, i, _kernels.LANE_MISC)
        for which, pts, norms, gated in (("top", b.top, b.f_plus, True), ("sigma", b.sigma, b.phi, False)):
            u = simplex_first_coordinate_pit(pts / norms[:, None])
            _, p_ks = ds.ks_uniform(u)
            p_ind = ds.independence_test(np.column_stack([norms, u]), permutations, rng)
            st = (lambda ok: _status(ok)) if gated else (lambda ok: REPORT)
            rows.append(ReportRow("conjecture", n, d, 0.0, f"{which}-direction-ks-p", p_ks, 0.0, 1e-3,
                                  "p>1e-3", st(p_ks > 1e-3)))
            rows.append(ReportRow("conjecture", n, d, 0.0, f"{which}-norm-direction-indep-p", p_ind, 0.0, 1e-3,
                                  "p>1e-3", st(p_ind > 1e-3)))
    return Outcome(rows)


def run_bounds_table(cfg: SimConfig, mc_trials: Optional[int] = None) -> Outcome:
    rows = []
    d = cfg.d
    T = int(mc_trials or cfg.trials[0])
    for k, i, n, a in _grid(cfg):
        sb = bd.shell(n, a, d, cfg.omega_rule)
        rng = RngStream(cfg.seed, k, _kernels.LANE_MISC)

        def add(stat, value, band, bound, rule, status):
            rows.append(ReportRow("bounds-table", n, d, a, stat, value, band, bound, rule, status))

        pn = an.p_n(n, d, cfg.omega_rule)
        add("p_n", pn, 0.0, an.p_n_asymptote(n, d, cfg.omega_rule), "reported", REPORT)
        add("prob_En", pl.prob_En(n, d), 0.0, pl.prob_En_asymptote(n, d), "reported", REPORT)
        add("lambda", sb.lam, 0.0, math.nan, "reported", REPORT)
        add("h_hat", sb.h_hat, 0.0, math.nan, "reported", REPORT)
        if abs(a) <= sb.a_n:
            dm = an.delta_mean(n, a, d)
            add("delta_mean", dm, 0.0, an.delta_mean_scale(n, d), "reported", REPORT)
            br = an.expected_Nbar_bracket(n, a, d, cfg.omega_rule)
            ex = an.expected_Nbar(n, a, d, cfg.omega_rule)
            add("Nbar-mean-exact", ex, br.width, br.mid, "lo<=exact<=hi", _status(br.contains(ex)))
            q_eps = sb.b_upper / sb.b_lower - 1
            qb, qe, qse = an.qn_bound_and_estimate(d, q_eps, T, rng)
            add("q_n", qe, qse, qb, "est<=bound+3se", _status(qe <= qb + 3 * qse))
            jn, jse = an.chen_stein_Jn(n, a, d, T, rng, cfg.omega_rule)
            c1, _ = an.jn_upper_chain(n, a, d, qe + 3 * qse, cfg.omega_rule)
            add("J_n", jn, jse, c1, "est<=chain+3se", _status(jn <= c1 + 3 * jse))
        else:
            add("delta_mean", math.nan, 0.0, math.nan, "a outside [-a_n, a_n]", REPORT)
        val, comp = an.erho_blower_bound(n, d, cfg.omega_rule)
        add("erho_blower", val, 0.0, comp, "reported", REPORT)
        for c in (d - 0.5, float(d)):
            up_leq, up_geq = an.moment_bounds(n, c, d)
            add(f"moment_upper_leq c={c:g}", up_leq, 0.0, an.b_tilde(n, c, d), "reported", REPORT)
            add(f"moment_upper_geq c={c:g}", up_geq, 0.0, an.b_tilde(n, c, d), "reported", REPORT)
    return Outcome(rows)


EXPERIMENTS = {
    "simulate": run_simulate,
    "gumbel-check": run_gumbel_check,
    "poisson-check": run_poisson_check,
    "mean-check": run_mean_check,
    "smallest2-check": run_smallest2_check,
    "conjecture": run_conjecture,
    "bounds-table": run_bounds_table,
}
