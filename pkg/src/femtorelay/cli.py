"""Command line: ``femtorelay run|summarize|validate``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from femtorelay.config import ConfigError
from femtorelay.experiment import parse_config, read_raw, run_experiment, write_summaries

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="femtorelay", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment plan")
    run.add_argument("config")
    run.add_argument("--out", help="output directory (overrides output_dir)")
    run.add_argument("--seed", type=int, help="seed base (overrides seed_base)")
    run.add_argument("--drops", type=int, help="drops per sweep point")
    run.add_argument("--workers", type=int, help="parallel worker processes")

    summ = sub.add_parser("summarize", help="rebuild summary files from a raw CSV")
    summ.add_argument("raw")
    summ.add_argument("--out", help="directory for summaries (default: next to the raw CSV)")

    val = sub.add_parser("validate", help="check a config file and print the resolved plan")
    val.add_argument("config")
    return p


def _overrides(plan, args):
    changes = {}
    for attr, key in (("seed", "seed_base"), ("drops", "drops"), ("workers", "workers")):
        val = getattr(args, attr)
        if val is not None:
            if val < (0 if key == "seed_base" else 1):
                raise ConfigError(key, f"out of range: {val}")
            changes[key] = val
    return dataclasses.replace(plan, **changes)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "validate":
            plan = parse_config(args.config)
            points = plan.points()
            print(f"ok: {len(points)} sweep point(s), schemes {','.join(s.value for s in plan.schemes)}, "
                  f"{plan.drops} drop(s) each")
            return EXIT_OK
        if args.command == "run":
            plan = _overrides(parse_config(args.config), args)
            out = run_experiment(plan, args.out)
            print(f"wrote {out}")
            return EXIT_OK
        if args.command == "summarize":
            raw = Path(args.raw)
            write_summaries(read_raw(raw), args.out or raw.parent)
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG if args.command in ("run", "validate") and not Path(args.config).exists() else EXIT_RUNTIME
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
