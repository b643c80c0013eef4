"""Experiment plans, Monte-Carlo drop execution and result files.

Seeding: drop ``d`` of a plan with base seed ``b`` uses topology seed
``b + d`` for every sweep point and scheme, so schemes are compared on the
same drops. The Phase II visiting order of scheme ``s`` comes from
``SeedSequence([b + d, 2, code(s)])``.
"""

from __future__ import annotations

import csv
import dataclasses
import itertools
import logging
import math
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from femtorelay.config import (ConfigError, MissingFieldError, RangeError, ScenarioConfig, Scheme,
                               UnknownKeyError, watt_to_dbm)
from femtorelay.game import evaluate_profile, initial_profile, run_game
from femtorelay.metrics import DropResult, MueRecord, summarize
from femtorelay.topology import generate_topology

log = logging.getLogger(__name__)

RAW_HEADER = ("sweep_point,scheme,drop,mue_id,relay_fbs,theta,power_dbm,rate_coarse,rate_fine,"
              "rate_total,delay_coarse,delay_fine,delay_total,utility,converged,iterations").split(",")

SWEEPABLE = ("num_fbs", "num_mues", "wired_total_capacity", "num_ota_channels", "delta", "nu",
             "num_subchannels")
PLAN_KEYS = {"scenario", "sweep", "schemes", "drops", "seed_base", "output_dir", "workers"}
SCHEME_CODE = {Scheme.CLA: 0, Scheme.WRD: 1, Scheme.OTA: 2}


@dataclass(frozen=True)
class ExperimentPlan:
    base: ScenarioConfig = field(default_factory=ScenarioConfig)
    sweep: tuple[tuple[str, tuple], ...] = ()  # (field, values); points are the product in order
    schemes: tuple[Scheme, ...] = (Scheme.CLA, Scheme.WRD, Scheme.OTA)
    drops: int = 10
    seed_base: int = 0
    output_dir: str = "results"
    workers: int = 1

    def points(self) -> list[tuple[str, ScenarioConfig]]:
        if not self.sweep:
            return [("base", self.base)]
        names = [k for k, _ in self.sweep]
        out = []
        for combo in itertools.product(*(v for _, v in self.sweep)):
            label = ";".join(f"{k}={v!r}" for k, v in zip(names, combo))
            out.append((label, self.base.replace(**dict(zip(names, combo)))))
        return out

    def to_dict(self) -> dict:
        defaults = ScenarioConfig().to_dict()
        scenario = {k: v for k, v in self.base.to_dict().items() if v != defaults[k]}
        return {
            "scenario": scenario,
            "sweep": {k: list(v) for k, v in self.sweep},
            "schemes": [s.value for s in self.schemes],
            "drops": self.drops,
            "seed_base": self.seed_base,
            "output_dir": self.output_dir,
            "workers": self.workers,
        }


def _check_int(key, val, minimum):
    if isinstance(val, bool) or not isinstance(val, int) or val < minimum:
        raise RangeError(key, f"must be an integer >= {minimum}, got {val!r}")


def _as_number(val):
    # YAML 1.1 reads "37.5e6" (no exponent sign) as a string
    if isinstance(val, str):
        try:
            return float(val)
        except ValueError:
            return val
    return val


def _coerce(key: str, val, like):
    if isinstance(like, (int, float)) and not isinstance(like, bool):
        val = _as_number(val)
    if isinstance(like, bool):
        if not isinstance(val, bool):
            raise RangeError(key, f"expected a boolean, got {val!r}")
        return val
    if isinstance(like, int):
        if isinstance(val, float) and val.is_integer():
            val = int(val)
        if isinstance(val, bool) or not isinstance(val, int):
            raise RangeError(key, f"expected an integer, got {val!r}")
        return val
    if isinstance(like, float):
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise RangeError(key, f"expected a number, got {val!r}")
        return float(val)
    if isinstance(like, tuple):
        if not isinstance(val, (list, tuple)):
            raise RangeError(key, f"expected a list, got {val!r}")
        return tuple(_coerce(key, _as_number(v), 0.0) for v in val)
    if not isinstance(val, str):
        raise RangeError(key, f"expected a string, got {val!r}")
    return val


def plan_from_dict(data: dict | None) -> ExperimentPlan:
    data = data or {}
    if not isinstance(data, dict):
        raise ConfigError("<root>", "config must be a mapping")
    unknown = set(data) - PLAN_KEYS
    if unknown:
        raise UnknownKeyError(sorted(unknown)[0], "unknown top-level key")
    defaults = ScenarioConfig()
    scen = data.get("scenario") or {}
    if not isinstance(scen, dict):
        raise ConfigError("scenario", "must be a mapping")
    kwargs = {}
    for key, val in scen.items():
        if key not in ScenarioConfig.field_names():
            raise UnknownKeyError(key, "unknown scenario key")
        if val is None:
            raise MissingFieldError(key, "value missing")
        kwargs[key] = _coerce(key, val, getattr(defaults, key))
    base = ScenarioConfig(**kwargs)

    sweep_raw = data.get("sweep") or {}
    if not isinstance(sweep_raw, dict):
        raise ConfigError("sweep", "must map scenario fields to value lists")
    sweep = []
    for key, vals in sweep_raw.items():
        if key not in SWEEPABLE:
            raise UnknownKeyError(key, f"not a sweepable field (choose from {', '.join(SWEEPABLE)})")
        if vals is None or (isinstance(vals, (list, tuple)) and not vals):
            raise MissingFieldError(key, "sweep needs at least one value")
        if not isinstance(vals, (list, tuple)):
            vals = [vals]
        vals = tuple(_coerce(key, v, getattr(defaults, key)) for v in vals)
        for v in vals:  # every point must be a valid scenario
            base.replace(**{key: v})
        sweep.append((key, vals))

    schemes_raw = data.get("schemes", ["CLA", "WRD", "OTA"])
    if not schemes_raw:
        raise MissingFieldError("schemes", "at least one scheme is required")
    try:
        schemes = tuple(Scheme(str(s).upper()) for s in schemes_raw)
    except ValueError as exc:
        raise RangeError("schemes", str(exc)) from None

    drops = data.get("drops", 10)
    _check_int("drops", drops, 1)
    seed_base = data.get("seed_base", 0)
    _check_int("seed_base", seed_base, 0)
    workers = data.get("workers", 1)
    _check_int("workers", workers, 1)
    out = data.get("output_dir", "results")
    if not isinstance(out, str) or not out:
        raise RangeError("output_dir", "must be a non-empty path")
    plan = ExperimentPlan(base, tuple(sweep), schemes, drops, seed_base, out, workers)
    for _, cfg in plan.points():
        if cfg.relaying and any(s is not Scheme.CLA for s in schemes) and cfg.num_fbs < cfg.num_mues:
            raise RangeError("num_fbs", f"relaying needs num_fbs >= num_mues at every point")
    return plan


def parse_config(path) -> ExperimentPlan:
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"malformed YAML: {exc}") from None
    return plan_from_dict(data)


def emit_config(plan: ExperimentPlan, path) -> None:
    Path(path).write_text(yaml.safe_dump(plan.to_dict(), sort_keys=False))


def game_seed(seed: int, scheme: Scheme) -> int:
    ss = np.random.SeedSequence([seed, 2, SCHEME_CODE[Scheme(scheme)]])
    return int(ss.generate_state(1)[0])


def run_drop(label: str, cfg: ScenarioConfig, schemes, drop: int, seed: int) -> list[DropResult]:
    """All schemes on one shared topology."""
    topo = generate_topology(cfg, seed)
    out = []
    for scheme in schemes:
        scheme = Scheme(scheme)
        if scheme is Scheme.CLA:
            actions = initial_profile((None,) * cfg.num_mues, cfg)
            converged, iterations = True, 0
        else:
            state = run_game(topo, cfg, scheme, seed=game_seed(seed, scheme))
            actions, converged, iterations = state.actions, state.converged, state.iteration
        records = []
        for m, (a, o) in enumerate(zip(actions, evaluate_profile(actions, topo, cfg, scheme))):
            records.append(MueRecord(
                mue_id=m,
                relay_fbs=a.relay_fbs,
                theta=0.0 if scheme is Scheme.CLA else cfg.theta_grid[a.theta_index],
                power_dbm=watt_to_dbm(cfg.power_levels_w[a.power_index]),
                rate_coarse=o.rates.coarse,
                rate_fine=o.rates.fine,
                rate_total=o.rates.total,
                delay_coarse=o.delays.coarse_delay,
                delay_fine=o.delays.fine_delay,
                delay_total=o.delays.total_delay,
                utility=o.utility,
            ))
        out.append(DropResult(label, scheme, drop, tuple(records), converged, iterations))
    return out


def _task(args):
    return run_drop(*args)


def execute(plan: ExperimentPlan) -> list[DropResult]:
    """Run every (point, drop) and return results in canonical order."""
    tasks = [(label, cfg, plan.schemes, d, plan.seed_base + d)
             for label, cfg in plan.points() for d in range(plan.drops)]
    if plan.workers > 1:
        with ProcessPoolExecutor(plan.workers) as pool:
            chunks = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * plan.workers))))
    else:
        chunks = [_task(t) for t in tasks]
    order = {label: i for i, (label, _) in enumerate(plan.points())}
    results = [r for chunk in chunks for r in chunk]
    results.sort(key=lambda r: (order[r.sweep_point], SCHEME_CODE[r.scheme], r.drop))
    unconverged = sum(not r.converged for r in results)
    if unconverged:
        log.warning("%d of %d games did not converge", unconverged, len(results))
    return results


# files

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_raw(results, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RAW_HEADER)
        for r in results:
            for m in r.mues:
                w.writerow([_fmt(v) for v in (
                    r.sweep_point, r.scheme.value, r.drop, m.mue_id, m.relay_fbs, m.theta, m.power_dbm,
                    m.rate_coarse, m.rate_fine, m.rate_total, m.delay_coarse, m.delay_fine, m.delay_total,
                    m.utility, r.converged, r.iterations)])


def read_raw(path) -> list[DropResult]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RAW_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        groups: dict[tuple, dict] = {}
        for row in reader:
            key = (row["sweep_point"], row["scheme"], int(row["drop"]))
            g = groups.setdefault(key, {"mues": [], "converged": row["converged"] == "1",
                                        "iterations": int(row["iterations"])})
            g["mues"].append(MueRecord(
                mue_id=int(row["mue_id"]),
                relay_fbs=int(row["relay_fbs"]) if row["relay_fbs"] else None,
                **{k: float(row[k]) for k in ("theta", "power_dbm", "rate_coarse", "rate_fine", "rate_total",
                                              "delay_coarse", "delay_fine", "delay_total", "utility")},
            ))
    return [DropResult(p, Scheme(s), d, tuple(g["mues"]), g["converged"], g["iterations"])
            for (p, s, d), g in groups.items()]


SUMMARY_HEADER = ["sweep_point", "scheme", "drops", "converged_drops", "unconverged_fraction", "samples",
                  "unstable", "mean_utility", "mean_rate", "mean_delay", "rate_q10", "rate_q50", "rate_q90",
                  "delay_q10", "delay_q50", "delay_q90", "rate_ratio", "delay_reduction", "utility_ratio"]


def slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9.]+", "_", label).strip("_") or "base"


def _summary_rows(label, summary):
    rows = []
    for scheme, s in summary.schemes.items():
        r = summary.ratios.get(scheme, {})
        dq = [s.delay_cdf.quantile(q) for q in (0.1, 0.5, 0.9)] if s.delay_cdf else [math.inf] * 3
        rows.append([label, scheme.value, s.drop_count, s.converged_drops, s.unconverged_fraction, s.samples,
                     s.unstable, s.mean_utility, s.mean_rate, s.mean_delay,
                     *[s.rate_cdf.quantile(q) for q in (0.1, 0.5, 0.9)], *dq,
                     r.get("rate", ""), r.get("delay", ""), r.get("utility", "")])
    return rows


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows([[_fmt(v) for v in row] for row in rows])


def _write_cdfs(out: Path, tag: str, summary) -> None:
    for scheme, s in summary.schemes.items():
        _write_csv(out / f"cdf_{tag}_{scheme.value}_rate.csv", ["value", "cdf"], s.rate_cdf.points())
        delay_points = s.delay_cdf.points() if s.delay_cdf else []
        _write_csv(out / f"cdf_{tag}_{scheme.value}_delay.csv", ["value", "cdf"], delay_points)


def write_summaries(results, out_dir) -> dict[str, object]:
    """Per-point summaries and CDFs, a pooled summary, and the best scheme per point."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    by_point: dict[str, list[DropResult]] = {}
    for r in results:
        by_point.setdefault(r.sweep_point, []).append(r)
    summaries = {}
    best_rows = []
    for label, drops in by_point.items():
        summary = summarize(drops)
        summaries[label] = summary
        _write_csv(out / f"summary_{slug(label)}.csv", SUMMARY_HEADER, _summary_rows(label, summary))
        _write_cdfs(out, slug(label), summary)
        best_rows.append([label, summary.best_scheme().value,
                          *[summary.schemes[s].mean_utility if s in summary.schemes else "" for s in Scheme]])
    # multi-axis sweeps: also pool over the other axes for each value of one axis (e.g. per-M curves)
    axes: dict[tuple[str, str], list[DropResult]] = {}
    for label, drops in by_point.items():
        pairs = [kv.split("=", 1) for kv in label.split(";") if "=" in kv]
        if len(pairs) > 1:
            for k, v in pairs:
                axes.setdefault((k, v), []).extend(drops)
    for (k, v), drops in axes.items():
        label = f"{k}={v}"
        summary = summarize(drops)
        summaries[f"by:{label}"] = summary
        _write_csv(out / f"summary_by_{slug(label)}.csv", SUMMARY_HEADER, _summary_rows(label, summary))
        _write_cdfs(out, f"by_{slug(label)}", summary)
    pooled = summarize(results) if len(by_point) > 1 else summaries[next(iter(by_point))]
    summaries["pooled"] = pooled
    _write_csv(out / "summary_pooled.csv", SUMMARY_HEADER, _summary_rows("pooled", pooled))
    _write_cdfs(out, "pooled", pooled)
    _write_csv(out / "best_scheme.csv",
               ["sweep_point", "best_scheme", *[f"mean_utility_{s.value}" for s in Scheme]], best_rows)
    return summaries


def run_experiment(plan: ExperimentPlan, out_dir=None) -> Path:
    out = Path(out_dir or plan.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = execute(plan)
    write_raw(results, out / "raw.csv")
    write_summaries(results, out)
    emit_config(plan, out / "plan.yaml")
    return out
