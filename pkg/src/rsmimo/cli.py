"""Command-line entry points: run sweeps to CSV and dump region constraints."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .bounds import GainTable, LayeredGainTable
from .harness import ConfigError, ExperimentConfig, figure_preset, run_sweep, write_csv
from .regions import ModifiedMacPolytope, dump_constraints, enumerate_rs_sets, enumerate_rs_sub_sets, layers_of_mask


def _build_config(args) -> ExperimentConfig:
    cfg = figure_preset(args.preset) if args.preset else ExperimentConfig()
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
        known = {f.name for f in dataclasses.fields(ExperimentConfig)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        cfg = dataclasses.replace(cfg, **data)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.mode is not None:
        cfg = dataclasses.replace(cfg, mode=args.mode)
    if args.realizations is not None:
        cfg = dataclasses.replace(cfg, realizations=args.realizations)
    cfg.validate()
    return cfg


def _cmd_simulate(args) -> int:
    cfg = _build_config(args)
    rows = run_sweep(cfg, progress=lambda line: print(line, file=sys.stderr))
    write_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    return 0


def _format_decode(mask: int, n_cells: int) -> str:
    names = sorted(f"{cell + 1}{layer}" for cell, layer in layers_of_mask(mask, n_cells))
    return "{" + ",".join(names) + "}"


def _cmd_dump_region(args) -> int:
    n_cells = args.num_cells
    enum = enumerate_rs_sub_sets if args.family == "sub" else enumerate_rs_sets
    receivers = [args.receiver - 1] if args.receiver else list(range(n_cells))
    ltable = None
    if args.mu is not None:
        # Unit gains and unit noise: enough to inspect how bounds move with mu.
        import numpy as np

        table = GainTable(
            np.ones((n_cells, n_cells)), np.ones(n_cells), 1.0, np.ones(n_cells)
        )
        ltable = LayeredGainTable(table, args.mu)
    for l in receivers:
        for mask in enum(l, n_cells):
            poly = ModifiedMacPolytope(l, mask, n_cells)
            print(f"# L={n_cells} receiver={l + 1} decode={_format_decode(mask, n_cells)}")
            print(dump_constraints(poly, ltable))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="rsmimo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a sweep and write a CSV of mean symmetric SE")
    sim.add_argument("--config", help="JSON file with ExperimentConfig fields")
    sim.add_argument("--preset", help="figure preset name (fig2a..fig5b)")
    sim.add_argument("--out", default="results.csv", help="output CSV path")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--mode", choices=["avg-mu", "optimize-mu"], default=None)
    sim.add_argument("--realizations", type=int, default=None)
    sim.set_defaults(func=_cmd_simulate)

    dump = sub.add_parser("dump-region", help="print layered region constraints")
    dump.add_argument("--L", dest="num_cells", type=int, required=True)
    dump.add_argument("--receiver", type=int, default=None, help="1-based receiver filter")
    dump.add_argument("--family", choices=["full", "sub"], default="full")
    dump.add_argument("--mu", type=float, default=None, help="also print bounds at this power split")
    dump.set_defaults(func=_cmd_dump_region)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
