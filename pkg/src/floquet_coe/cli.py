"""Command-line experiment runner.

Usage::

    floquet-coe --config run.cfg [--output DIR] [--threads K] [--seed S]

Writes ``summary.json`` and one ``<curve>.csv`` per curve into the output
directory. Exit status: 0 on success, 2 for an invalid configuration, 1 for a
numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from .config import load_config
from .errors import ConfigError, FloquetCOEError
from .experiments import ExperimentResult, run_experiment

log = logging.getLogger("floquet_coe")


def _fmt(v) -> str:
    if isinstance(v, float) or hasattr(v, "dtype") and v.dtype.kind == "f":
        return format(float(v), ".17g")
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def write_artifacts(result: ExperimentResult, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, (header, rows) in sorted(result.curves.items()):
        path = out / f"{name}.csv"
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
        written.append(path)
    path = out / "summary.json"
    path.write_text(json.dumps(_jsonable(result.summary), sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")
    written.append(path)
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="floquet-coe", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", required=True, help="key = value configuration file")
    parser.add_argument("--output", help="output directory (overrides output_dir)")
    parser.add_argument("--threads", type=int, help="worker processes for realizations")
    parser.add_argument("--seed", type=int, help="master seed (overrides master_seed)")
    parser.add_argument("-v", "--verbose", action="store_true")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, {"output_dir": args.output, "threads": args.threads,
                                        "master_seed": args.seed})
    except ConfigError as exc:
        print(f"floquet-coe: invalid configuration: {exc}", file=sys.stderr)
        return 2
    try:
        result = run_experiment(cfg)
    except ConfigError as exc:
        print(f"floquet-coe: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (FloquetCOEError, ArithmeticError) as exc:
        print(f"floquet-coe: numerical failure: {exc}", file=sys.stderr)
        return 1
    for path in write_artifacts(result, cfg.output_dir):
        log.info("wrote %s", path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
