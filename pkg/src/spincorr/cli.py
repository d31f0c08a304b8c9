"""Command-line interface: ``spincorr {eval,sweep,figure,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 numerical failure.
"""
import argparse
import json
import math
import os
import sys

from .correlations import correlation_report
from .errors import (InvalidDimension, InvalidGrid, InvalidInput, InvalidSpec,
                     InvalidState, InvalidTemperature, MatrixOverflow, NotHermitian,
                     NumericalFailure, SweepIOError)
from .models import ThermalPoint, make_spec
from .sweep import (FIGURE_IDS, MODEL_PARAMETERS, SweepGrid, emit_csv, figure_preset,
                    parse_axis, run_sweep)
from .verification import RANDOM_SAMPLES, run_verification

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

# flag name -> (type, default); also the keys accepted in a config file
GLOBAL_FLAGS = {
    "out": (str, None),
    "threads": (int, 1),
    "seed": (int, 0),
    "grid-density": (int, 1),
    "samples": (int, RANDOM_SAMPLES),
}
LIST_KEYS = ("axis", "fix")


class UsageError(Exception):
    pass


def _add_global_flags(parser, suppress):
    # the subparsers get SUPPRESS defaults so a flag given before the
    # subcommand is not overwritten by the subparser default
    for name, (kind, _) in GLOBAL_FLAGS.items():
        parser.add_argument(f"--{name}", type=kind,
                            default=argparse.SUPPRESS if suppress else None)
    parser.add_argument("--config", default=argparse.SUPPRESS if suppress else None,
                        help="file of 'key = value' lines using the long flag names")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spincorr",
        description="Thermal quantum correlations of two-qubit Heisenberg models.")
    _add_global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="one parameter point -> JSON report")
    p.add_argument("model", choices=("xxz", "dm"))
    p.add_argument("params", nargs="*", metavar="NAME=VALUE",
                   help="xxz: J Jz B b T; dm: J D T")
    _add_global_flags(p, suppress=True)

    p = sub.add_parser("sweep", help="explicit grid -> CSV")
    p.add_argument("--model", required=True, choices=tuple(MODEL_PARAMETERS))
    p.add_argument("--axis", action="append", default=[], metavar="NAME=START:STOP:STEP")
    p.add_argument("--fix", action="append", default=[], metavar="NAME=VALUE")
    _add_global_flags(p, suppress=True)

    p = sub.add_parser("figure", help="figure preset -> one CSV per panel")
    p.add_argument("figure_id", choices=FIGURE_IDS)
    p.add_argument("--axis", action="append", default=[], metavar="NAME=START:STOP:STEP",
                   help="override a preset axis range")
    _add_global_flags(p, suppress=True)

    p = sub.add_parser("verify", help="closed forms vs generic pipeline")
    _add_global_flags(p, suppress=True)
    return parser


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as err:
        raise UsageError(f"cannot read config {path}: {err.strerror}") from err
    for number, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().lstrip("-"), value.strip()
        if not sep or not key:
            raise UsageError(f"{path}:{number}: expected 'key = value'")
        if key in LIST_KEYS:
            values.setdefault(key, []).append(value)
        elif key in GLOBAL_FLAGS:
            try:
                values[key] = GLOBAL_FLAGS[key][0](value)
            except ValueError:
                raise UsageError(f"{path}:{number}: bad value for {key}: {value!r}") from None
        else:
            raise UsageError(f"{path}:{number}: unknown key {key!r}")
    return values


def resolve_options(args):
    """Merge command line, config file and defaults (in that priority)."""
    config = read_config(args.config) if args.config else {}
    opts = {}
    for name, (_, default) in GLOBAL_FLAGS.items():
        attr = name.replace("-", "_")
        given = getattr(args, attr, None)
        opts[attr] = given if given is not None else config.get(name, default)
    for key in LIST_KEYS:
        # config entries first so repeated command-line entries win
        opts[key] = config.get(key, []) + getattr(args, key, [])
    if opts["threads"] < 1:
        raise UsageError("--threads must be >= 1")
    if opts["grid_density"] < 1:
        raise UsageError("--grid-density must be >= 1")
    if opts["samples"] < 0:
        raise UsageError("--samples must be >= 0")
    return opts


def parse_assignments(items):
    values = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"expected NAME=VALUE, got {item!r}")
        try:
            values[name.strip()] = float(value)
        except ValueError:
            raise UsageError(f"not a number in {item!r}") from None
    return values


def _finite(x):
    return x if math.isfinite(x) else None


def cmd_eval(args, opts, stdout):
    params = parse_assignments(args.params)
    if "T" not in params:
        raise UsageError("eval needs a temperature T=...")
    T = params.pop("T")
    point = ThermalPoint(make_spec(args.model, **params), T)
    report = correlation_report(point).as_dict()
    doc = {"model": args.model, "parameters": {**params, "T": T}}
    doc.update({k: _finite(v) for k, v in report.items()})
    text = json.dumps(doc, indent=2) + "\n"
    _write_text(text, opts["out"], stdout)
    return EXIT_OK


def _write_text(text, out, stdout):
    if out is None:
        stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as err:
        raise SweepIOError(err.errno, f"cannot write {out}: {err.strerror}", out) from err


def cmd_sweep(args, opts, stdout):
    axes = tuple(parse_axis(a) for a in opts["axis"])
    grid = SweepGrid(args.model, axes, parse_assignments(opts["fix"]))
    grid = grid.refined(opts["grid_density"])
    result = run_sweep(grid, threads=opts["threads"])
    emit_csv(result, stdout if opts["out"] is None else opts["out"])
    return EXIT_OK


def cmd_figure(args, opts, stdout):
    overrides = {a.name: a for a in (parse_axis(t) for t in opts["axis"])}
    grids = figure_preset(args.figure_id)
    known = {n for g in grids for n in g.axis_names}
    unknown = set(overrides) - known
    if unknown:
        raise UsageError(f"{args.figure_id} has no axis {sorted(unknown)}; axes are {sorted(known)}")
    out_dir = opts["out"] or "."
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as err:
        raise SweepIOError(err.errno, f"cannot create {out_dir}: {err.strerror}", out_dir) from err
    for grid in grids:
        grid = grid.with_axes(overrides).refined(opts["grid_density"])
        result = run_sweep(grid, threads=opts["threads"])
        name = args.figure_id + (f"_{grid.label}" if grid.label else "") + ".csv"
        path = os.path.join(out_dir, name)
        emit_csv(result, path)
        stdout.write(f"wrote {path} ({len(result)} rows)\n")
    return EXIT_OK


def cmd_verify(args, opts, stdout):
    report = run_verification(seed=opts["seed"], grid_density=opts["grid_density"],
                              threads=opts["threads"], samples=opts["samples"])
    _write_text(report.text(), opts["out"], stdout)
    return EXIT_OK if report.ok else EXIT_VERIFY


COMMANDS = {"eval": cmd_eval, "sweep": cmd_sweep, "figure": cmd_figure, "verify": cmd_verify}
USAGE_ERRORS = (UsageError, InvalidInput, InvalidGrid, InvalidSpec, InvalidTemperature,
                InvalidDimension, NotHermitian, SweepIOError)
NUMERIC_ERRORS = (NumericalFailure, MatrixOverflow, InvalidState)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage and 0 for --help
        return int(exc.code or 0)
    try:
        opts = resolve_options(args)
        return COMMANDS[args.command](args, opts, stdout)
    except USAGE_ERRORS as err:
        stderr.write(f"spincorr: error: {err}\n")
        return EXIT_USAGE
    except NUMERIC_ERRORS as err:
        stderr.write(f"spincorr: numerical failure: {err}\n")
        return EXIT_NUMERIC
