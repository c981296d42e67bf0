"""``recordlab`` command line: parse flags and config, run one experiment,
write ``<out>/<subcommand>-<timestamp>.csv`` and ``.json``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from decimal import Decimal, InvalidOperation
from pathlib import Path

import numpy as np

from . import boundaries as bd
from .harness import EXPERIMENTS, Outcome, SimConfig

CSV_COLUMNS = ["experiment", "n", "d", "a", "statistic", "value", "se_or_band", "bound_or_target", "rule", "pass"]
CONFIG_KEYS = {"d", "n", "a", "trials", "seed", "omega", "workers", "out", "engine", "budget", "raw"}


class UsageError(Exception):
    pass


def parse_int(text: str) -> int:
    """Exact integer from '1000000', '1e6', '10^6' or '10**6'."""
    t = str(text).strip().replace("_", "")
    for op in ("^", "**"):
        if op in t:
            base, exp = t.split(op, 1)
            return int(base) ** int(exp)
    try:
        v = Decimal(t)
    except InvalidOperation:
        raise UsageError(f"not an integer: {text!r}") from None
    if v != v.to_integral_value():
        raise UsageError(f"not an integer: {text!r}")
    return int(v)


def parse_list(text: str) -> list[str]:
    return [p for p in (s.strip() for s in str(text).split(",")) if p]


def read_config(path: str) -> dict[str, str]:
    out = {}
    for k, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{k}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-").lstrip("-")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{k}: unknown key {key!r}")
        out[key] = val
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="recordlab", description="Maxima of exponential samples: simulation checks.")
    p.add_argument("subcommand", choices=sorted(EXPERIMENTS))
    p.add_argument("--d", help="dimension (default 2)")
    p.add_argument("--n", help="comma-separated sample sizes, e.g. 1e3,10^5")
    p.add_argument("--a", help="comma-separated offsets; numbers or a_n, -a_n; 'auto' = -a_n,0,a_n")
    p.add_argument("--trials", help="trials, one value or one per n")
    p.add_argument("--seed", help="64-bit seed (RECORDLAB_SEED overrides)")
    p.add_argument("--omega", help="inner-boundary rule: default, sqrt-l3, l4 or a number")
    p.add_argument("--workers", help="worker processes (output does not depend on it)")
    p.add_argument("--out", help="output directory (default results)")
    p.add_argument("--engine", help="Model-E engine: tail (default) or stream")
    p.add_argument("--budget", help="sampled-point budget for the stream engine (default 1e10)")
    p.add_argument("--config", help="key=value file; flags given on the command line win")
    p.add_argument("--raw", action="store_true", default=None, help="also write per-trial data")
    return p


def make_config(args: argparse.Namespace, environ=os.environ) -> SimConfig:
    opts = read_config(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            opts[key] = v
    if environ.get("RECORDLAB_SEED"):
        opts["seed"] = environ["RECORDLAB_SEED"]
    cfg = SimConfig()
    try:
        if "d" in opts:
            cfg.d = int(opts["d"])
        if "n" in opts:
            cfg.n_grid = [parse_int(x) for x in parse_list(opts["n"])]
        if "a" in opts:
            cfg.a_grid = ["-a_n", "0", "a_n"] if opts["a"].strip() == "auto" else parse_list(opts["a"])
        if "trials" in opts:
            cfg.trials = [parse_int(x) for x in parse_list(opts["trials"])]
        if "seed" in opts:
            cfg.seed = parse_int(opts["seed"])
        if "omega" in opts:
            cfg.omega_rule = bd.parse_omega_rule(opts["omega"])
        if "workers" in opts:
            cfg.workers = int(opts["workers"])
        if "out" in opts:
            cfg.output_dir = opts["out"]
        if "engine" in opts:
            cfg.engine = opts["engine"]
        if "budget" in opts:
            cfg.budget = float(opts["budget"])
        if "raw" in opts:
            cfg.raw = opts["raw"] is True or str(opts["raw"]).lower() in ("1", "true", "yes")
    except ValueError as e:
        raise UsageError(str(e)) from None
    if cfg.d < 2:
        raise UsageError("dimension must be >= 2")
    if not cfg.n_grid or any(n < 1 for n in cfg.n_grid):
        raise UsageError("--n needs positive sizes")
    if not cfg.trials or any(t < 1 for t in cfg.trials):
        raise UsageError("trials must be >= 1")
    if len(cfg.trials) not in (1, len(cfg.n_grid)):
        raise UsageError("--trials needs one value or one per n")
    if not 0 <= cfg.seed < 2**64:
        raise UsageError("seed must fit in 64 unsigned bits")
    if cfg.workers < 1:
        raise UsageError("workers must be >= 1")
    if cfg.engine not in ("tail", "stream"):
        raise UsageError("engine must be tail or stream")
    return cfg


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % float(v)


def rows_csv(outcome: Outcome) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(CSV_COLUMNS)
    for r in sorted(outcome.rows, key=lambda r: r.sort_key()):
        w.writerow([r.experiment, _fmt(r.n), _fmt(r.d), _fmt(r.a), r.statistic, _fmt(r.value),
                    _fmt(r.se_or_band), _fmt(r.bound_or_target), r.rule, r.status])
    return buf.getvalue()


def raw_csv(outcome: Outcome) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    for tab in outcome.raw:
        names = list(tab.columns)
        w.writerow(["table"] + names)
        cols = [np.asarray(tab.columns[c]) for c in names]
        for k in range(len(cols[0]) if cols else 0):
            w.writerow([tab.name] + [_fmt(c[k].item()) for c in cols])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return v


def rows_json(subcommand: str, cfg: SimConfig, outcome: Outcome) -> str:
    rows = []
    for r in sorted(outcome.rows, key=lambda r: r.sort_key()):
        rows.append({
            "experiment": r.experiment, "n": str(r.n) if r.n > 2**53 else int(r.n), "d": r.d,
            "a": _json_value(float(r.a)), "statistic": r.statistic, "value": _json_value(float(r.value)),
            "se_or_band": _json_value(float(r.se_or_band)), "bound_or_target": _json_value(float(r.bound_or_target)),
            "rule": r.rule, "pass": r.status,
        })
    conf = {"d": cfg.d, "n": [str(n) for n in cfg.n_grid], "a": cfg.a_grid, "trials": cfg.trials,
            "seed": cfg.seed, "omega": str(cfg.omega_rule), "engine": cfg.engine}
    return json.dumps({"subcommand": subcommand, "config": conf, "rows": rows,
                       "failed": outcome.failed}, indent=2, sort_keys=True) + "\n"


def _stem(out: Path, sub: str) -> Path:
    base = f"{sub}-{time.strftime('%Y%m%dT%H%M%S')}"
    stem, k = out / base, 1
    while stem.with_suffix(".csv").exists():
        stem = out / f"{base}-{k}"
        k += 1
    return stem


def write_outputs(subcommand: str, cfg: SimConfig, outcome: Outcome) -> dict[str, Path]:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = _stem(out, subcommand)
    paths = {"csv": stem.with_suffix(".csv"), "json": stem.with_suffix(".json")}
    paths["csv"].write_text(rows_csv(outcome), newline="")
    paths["json"].write_text(rows_json(subcommand, cfg, outcome))
    if outcome.raw:
        paths["raw"] = stem.parent / (stem.name + "-raw.csv")
        paths["raw"].write_text(raw_csv(outcome), newline="")
    return paths


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        outcome = EXPERIMENTS[args.subcommand](cfg)
    except (UsageError, ValueError) as e:
        parser.print_usage(sys.stderr)
        print(f"recordlab: error: {e}", file=sys.stderr)
        return 2
    if args.subcommand != "simulate" and not cfg.raw:
        outcome.raw = []
    paths = write_outputs(args.subcommand, cfg, outcome)
    for kind, p in paths.items():
        print(f"{kind}: {p}")
    for r in sorted(outcome.rows, key=lambda r: r.sort_key()):
        print(f"{r.status:12s} {r.experiment} n={r.n} a={r.a:.4g} {r.statistic} = {r.value:.6g} ({r.rule})")
    return 1 if outcome.failed else 0


if __name__ == "__main__":
    sys.exit(main())
