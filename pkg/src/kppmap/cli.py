"""Command-line driver: ``kppmap --scenario <name> [options]``."""

from __future__ import annotations

import argparse
import sys
import time
from typing import Optional, Sequence

from .io import GridFormatError, RunConfig, load_config, parse_config_text
from .kernels import DivergenceError
from .reference import ParameterError
from .scenarios import SCENARIOS, ConfigError, RunSummary, run_scenario

EXIT_CONFIG = 2
EXIT_DIVERGED = 3


def _fraction(text: str) -> float:
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="kppmap",
        description="Fisher/KPP population spread on masked grids (semi-implicit splitting).",
    )
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--config", help="key = value file with RunConfig fields")
    p.add_argument("--h", type=_fraction, help="time step (fractions like 1/8 allowed)")
    p.add_argument("--dx", type=_fraction, help="grid spacing")
    p.add_argument("--beta", type=float, help="regularizer exponent (default 4)")
    p.add_argument("--nu", type=float, help="sigmoid interpolation exponent (default 1)")
    p.add_argument("--fr", type=float, help="desert capacity fraction (default 0.01)")
    p.add_argument("--smooth-L", type=int, dest="smooth_L", help="capacity smoothing half-width")
    p.add_argument("--no-regularize", action="store_true", help="use plain u/K ratios")
    p.add_argument("--no-alt", action="store_true", help="keep a fixed sweep order")
    p.add_argument("--t-end", type=_fraction, dest="t_end")
    p.add_argument("--snapshot-every", type=_fraction, dest="snapshot_every")
    p.add_argument("--out", help="output directory (default ./out)")
    p.add_argument("--mask", help="mask grid file")
    p.add_argument("--frames", help="capacity frame manifest")
    p.add_argument("--init", help="initial field file or shape, e.g. strip:x=-30,w=3")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any config field (repeatable)")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        values.update(load_config(args.config))
    for name in ("scenario", "h", "dx", "beta", "nu", "fr", "smooth_L", "t_end",
                 "snapshot_every", "out", "mask", "frames", "init"):
        v = getattr(args, name)
        if v is not None:
            values[name] = v
    if args.no_regularize:
        values["regularize"] = False
    if args.no_alt:
        values["alternate_directions"] = False
    if args.set:
        values.update(parse_config_text("\n".join(args.set), "--set"))
    if "scenario" not in values:
        raise ConfigError("no scenario given (use --scenario or a config file)")
    return RunConfig(**values)


def format_summary(s: RunSummary, wall: float) -> str:
    return (f"final t = {s.t_final:.6g}  steps = {s.steps}  "
            f"min u = {s.u_min:.6g}  max u = {s.u_max:.6g}  wall = {wall:.2f} s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        t0 = time.perf_counter()
        summary = run_scenario(cfg)
    except (ConfigError, GridFormatError, ParameterError, FileNotFoundError) as e:
        print(f"kppmap: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as e:
        print(f"kppmap: diverged at step {e.step_index}: {e}", file=sys.stderr)
        return EXIT_DIVERGED
    wall = time.perf_counter() - t0
    print(format_summary(summary, wall))
    for k, v in summary.metrics.items():
        print(f"  {k} = {v}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
