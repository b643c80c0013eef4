"""Shared plumbing for the experiment scripts."""

import argparse
import dataclasses
import logging
from pathlib import Path

from femtorelay.experiment import execute, parse_config, write_raw, write_summaries

ROOT = Path(__file__).resolve().parents[1]


def run_from_args(default_config: str, description: str):
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--config", default=str(ROOT / "configs" / default_config))
    ap.add_argument("--drops", type=int, help="override drops per sweep point")
    ap.add_argument("--workers", type=int, help="parallel worker processes")
    ap.add_argument("--out", help="output directory (default: output_dir of the config)")
    ap.add_argument("--set", nargs="*", default=[], metavar="KEY=VALUE",
                    help="override scenario fields, e.g. --set fine_decoding=sic delta=0.8")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    plan = parse_config(args.config)
    changes = {k: v for k, v in (("drops", args.drops), ("workers", args.workers)) if v is not None}
    if args.set:
        import yaml
        scen = dict(kv.split("=", 1) for kv in args.set)
        base = plan.base.replace(**{k: yaml.safe_load(v) for k, v in scen.items()})
        changes["base"] = base
    plan = dataclasses.replace(plan, **changes)
    out = Path(args.out or plan.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = execute(plan)
    write_raw(results, out / "raw.csv")
    summaries = write_summaries(results, out)
    print(f"results in {out}")
    return plan, summaries
