"""Command-line front end.

Usage::

    pmcs simulate --config golden.scn --out run.csv [--stride 60] [--threshold-v 4.0]
    pmcs report --csv run.csv [--threshold-v 4.0]

Exit codes: 0 success, 2 invalid scenario or CSV, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from collections.abc import Sequence

from pmcs.csvio import read_csv, save_csv
from pmcs.engine import Report, simulate, summarize
from pmcs.errors import ConfigError, CsvFormatError
from pmcs.scenario import config_from_sections, parse_scenario

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3
DEFAULT_STRIDE = 60


def format_report(rep: Report) -> str:
    verdict = "true" if rep.self_sustainable else "false"
    rel = "≥" if rep.self_sustainable else "<"
    lines = [
        f"min_v_bat_V: {rep.min_v_bat_V:.9g}",
        f"min_soc: {rep.min_soc:.9g}",
        f"self_sustainable: {verdict} (min {rep.min_v_bat_V:.3f} V {rel} {rep.threshold_V:.2f} V)",
        f"total_captures: {rep.total_captures}",
        f"charge_full_count: {rep.charge_full_count}",
        f"brownout_count: {rep.brownout_count}",
        f"energy_residual_J: {rep.energy_residual_J:.9g}",
        f"min_daily_mean_v_bat_V: {rep.min_daily_mean_v_bat_V:.9g}",
        f"e_harvested_J: {rep.e_harvested_J:.9g}",
        f"e_consumed_J: {rep.e_consumed_J:.9g}",
        f"e_loss_J: {rep.e_loss_J:.9g}",
    ]
    return "\n".join(lines)


def cmd_simulate(config_path: str, out_path: str, stride: int | None = None, threshold_V: float | None = None) -> int:
    """Run a scenario file, write its CSV and print the report.

    ``stride`` overrides the scenario's ``output_stride``; when neither is
    given, one row is written per minute of simulated time at dt = 1 s.
    """
    try:
        with open(config_path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {config_path}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        sections = parse_scenario(text)
        cfg = config_from_sections(sections)
        if stride is None and "output_stride" not in sections["simulation"]:
            stride = DEFAULT_STRIDE
        if stride is not None:
            cfg = dataclasses.replace(cfg, output_stride=stride)
        if threshold_V is not None:
            cfg = dataclasses.replace(cfg, threshold_V=threshold_V)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    res = simulate(cfg)
    try:
        save_csv(res, out_path)
    except OSError as exc:
        print(f"error: cannot write {out_path}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(format_report(summarize(res, cfg.threshold_V)))
    return EXIT_OK


def cmd_report(csv_path: str, threshold_V: float = 4.0) -> int:
    """Recompute the report from a CSV written by ``simulate``."""
    try:
        res = read_csv(csv_path)
    except CsvFormatError as exc:
        print(f"error: {csv_path}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: cannot read {csv_path}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(format_report(summarize(res, threshold_V)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pmcs", description="Solar/USB power-management board simulator.")
    sub = ap.add_subparsers(dest="command", required=True)
    sim = sub.add_parser("simulate", help="run a scenario file and write a CSV")
    sim.add_argument("--config", required=True, metavar="PATH")
    sim.add_argument("--out", required=True, metavar="PATH")
    sim.add_argument("--stride", type=int, default=None, metavar="N", help="steps per CSV row (default 60)")
    sim.add_argument("--threshold-v", type=float, default=None, metavar="FLOAT", help="self-sustainability threshold (default 4.0)")
    rep = sub.add_parser("report", help="recompute the report from a CSV")
    rep.add_argument("--csv", required=True, metavar="PATH")
    rep.add_argument("--threshold-v", type=float, default=4.0, metavar="FLOAT")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "simulate":
        if args.stride is not None and args.stride < 1:
            print("error: --stride must be >= 1", file=sys.stderr)
            return EXIT_INVALID
        return cmd_simulate(args.config, args.out, args.stride, args.threshold_v)
    return cmd_report(args.csv, args.threshold_v)


if __name__ == "__main__":
    sys.exit(main())
