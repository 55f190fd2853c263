"""Command-line front end: table generation, campaigns, sweeps, validation.

Exit codes: 0 success, 2 usage error, 3 unreadable config, 4 invariant
violation.  Every failure prints a single ``error: ...`` line on stderr.
All output files are written to a temporary name and renamed on success.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import geometry as geo
from . import simulation as sim
from . import waveform as wf
from .geometry import ConfigurationError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_INVARIANT = 4

OUTPUT_DIR_ENV = "D2D_UNDERLAY_OUT"

_PAIR_NAMES = {"ofdm": wf.OFDM, "fbmc": wf.FBMC}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class UsageError(Exception):
    pass


def _build_parser():
    p = _Parser(prog="d2d-underlay",
                description="Monte Carlo simulator of asynchronous D2D pairs "
                            "underlaying an OFDMA uplink.")
    sub = p.add_subparsers(dest="subcommand", metavar="{tables,run,sweep,validate}")

    t = sub.add_parser("tables", parents=[], add_help=True,
                       help="generate interference tables as CSV")
    t.add_argument("--pair", default="all",
                   help="interferer:victim, e.g. fbmc:fbmc, or 'all'")
    t.add_argument("--method", choices=["time", "psd"], default="time",
                   help="averaging method (receiver simulation or PSD overlap)")
    t.add_argument("--offsets", type=int, default=400,
                   help="number of timing offsets averaged (time method)")
    t.add_argument("--span", type=int, default=36,
                   help="largest spectral distance tabulated")
    t.add_argument("--fft-size", type=int, default=512,
                   help="subcarriers in the prototype filter design")
    t.add_argument("--seed", type=int, default=0, help="offset-draw seed")
    t.add_argument("--out", default=None, help="output directory")

    r = sub.add_parser("run", help="run one Monte Carlo campaign")
    r.add_argument("--config", required=True, help="key = value config file")
    r.add_argument("--out", default=None, help="output directory")
    r.add_argument("--seed", type=int, default=None, help="override config seed")
    r.add_argument("--jobs", type=int, default=0,
                   help="worker processes (0 = sequential)")

    s = sub.add_parser("sweep", help="sweep one parameter, one campaign per value")
    s.add_argument("--config", required=True, help="key = value config file")
    s.add_argument("--parameter", required=True,
                   choices=["num_pairs", "cluster_radius", "cluster_distance"])
    s.add_argument("--values", required=True,
                   help="comma-separated list of parameter values")
    s.add_argument("--out", default=None, help="output directory")
    s.add_argument("--seed", type=int, default=None, help="override config seed")
    s.add_argument("--jobs", type=int, default=0,
                   help="worker processes (0 = sequential)")

    v = sub.add_parser("validate", help="check a config (and optional tables) "
                                        "without running")
    v.add_argument("--config", required=True, help="key = value config file")
    v.add_argument("--tables", default=None,
                   help="directory of table CSVs to validate")
    return p


def _out_dir(args):
    out = getattr(args, "out", None) or os.environ.get(OUTPUT_DIR_ENV) or "."
    os.makedirs(out, exist_ok=True)
    return out


def _load_config(path, seed_override):
    try:
        config = geo.load_config(path)
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc))
    except ConfigurationError:
        raise
    if seed_override is not None:
        config = geo.with_updates(config, seed=seed_override)
    return config


class ConfigError(Exception):
    pass


def _build_tables(config=None, fft_size=512, offsets=400, half_span=36, seed=0):
    filt = wf.build_phydyas_filter(4, fft_size)
    return wf.build_all_tables(filt, half_span=half_span,
                               num_offsets=offsets, seed=seed)


def _cmd_tables(args):
    out = _out_dir(args)
    filt = wf.build_phydyas_filter(4, args.fft_size)
    method = wf.TIME_SIM if args.method == "time" else wf.PSD
    if args.pair == "all":
        pairs = [(a, b) for a in _PAIR_NAMES.values() for b in _PAIR_NAMES.values()]
    else:
        a, _, b = args.pair.partition(":")
        try:
            pairs = [(wf.parse_waveform(a), wf.parse_waveform(b))]
        except wf.UnsupportedParameterError:
            raise UsageError("unknown waveform pair %r" % args.pair)
    for a, b in pairs:
        if method == wf.TIME_SIM:
            table = wf.table_from_time_sim(a, b, filt, args.span,
                                           args.offsets, seed=args.seed)
        else:
            table = wf.table_from_psd(a, b, filt, args.span)
        name = "table_%s_%s.csv" % (a.kind.value.lower(), b.kind.value.lower())
        wf.save_table(table, os.path.join(out, name))
        print(os.path.join(out, name))
    return EXIT_OK


def _cmd_run(args):
    config = _load_config(args.config, args.seed)
    out = _out_dir(args)
    tables = _build_tables()
    report = sim.run_campaign(config, tables, jobs=args.jobs)
    sim.write_samples_csv(report, os.path.join(out, "samples.csv"))
    sim.write_cdf_csv(report, os.path.join(out, "cdf.csv"))
    sim.write_gnuplot_cdf(os.path.join(out, "cdf.gp"))
    print("%d iterations, %d skipped -> %s" % (report.iterations,
                                               report.skipped, out))
    return EXIT_OK


def _cmd_sweep(args):
    config = _load_config(args.config, args.seed)
    out = _out_dir(args)
    parameter = sim.SweepParameter[args.parameter.upper()]
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError("bad --values: %s" % exc)
    if not values:
        raise UsageError("--values must list at least one value")
    tables = _build_tables()
    points = sim.sweep(config, parameter, values, tables, jobs=args.jobs)
    sim.write_sweep_csv(parameter, points, os.path.join(out, "sweep.csv"))
    sim.write_gnuplot_sweep(parameter, os.path.join(out, "sweep.gp"))
    print("%d sweep points -> %s" % (len(points), out))
    return EXIT_OK


def _cmd_validate(args):
    config = _load_config(args.config, None)
    config.validate()
    if args.tables:
        names = sorted(n for n in os.listdir(args.tables) if n.endswith(".csv"))
        for name in names:
            wf.load_table(os.path.join(args.tables, name)).validate()
    print("ok")
    return EXIT_OK


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    if args.subcommand is None:
        print("error: a subcommand is required (tables, run, sweep, validate)",
              file=sys.stderr)
        return EXIT_USAGE
    handler = {"tables": _cmd_tables, "run": _cmd_run,
               "sweep": _cmd_sweep, "validate": _cmd_validate}[args.subcommand]
    try:
        return handler(args)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigurationError, wf.TableValidationError, wf.TableFormatError,
            sim.EmptyReportError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
