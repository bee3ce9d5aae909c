"""Command-line entry point: ``grfstream {run,pair,suite,dump-grf}``.

Every ``ExperimentConfig`` field has a flag (``learner_params`` becomes
``--learner-params``). Flags override values read from ``--config``.
Exit status is 0 on success, 1 when a run or suite entry failed and 2 on
usage errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from importlib import resources
from pathlib import Path

from .encoding import GrfConfig, dump_encoding_grid, write_grid
from .learners import canonical_name
from .harness import (
    LEARNER_COLUMNS,
    SUMMARY_COLUMNS,
    ExperimentConfig,
    expand_suite,
    run_paired,
    run_single,
    run_suite,
    write_suite_outputs,
    write_table,
)

log = logging.getLogger("grfstream")


def _items(text):
    return [int(v) if v.lstrip("-").isdigit() else v for v in text.split(",") if v]


def _int_or_name(text):
    return int(text) if text.lstrip("-").isdigit() else text


_PARSERS = {
    "int": int,
    "int | None": int,
    "float": float,
    "str": str,
    "str | None": str,
    "dict": json.loads,
    "list": _items,
    "list | None": _items,
    "int | str": _int_or_name,
}


def _add_config_flags(parser):
    group = parser.add_argument_group("experiment config")
    group.add_argument("--config", type=Path, help="flat JSON file with config fields")
    for f in dataclasses.fields(ExperimentConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.type == "bool":
            group.add_argument(flag, dest=f.name, action=argparse.BooleanOptionalAction,
                               default=argparse.SUPPRESS)
        else:
            hint = " (JSON object)" if f.type == "dict" else " (comma separated)" if "list" in f.type else ""
            group.add_argument(flag, dest=f.name, type=_PARSERS[f.type], default=argparse.SUPPRESS,
                               metavar=f.name.upper(), help=f"default: {_default(f)!r}{hint}")


def _default(f):
    if f.default is not dataclasses.MISSING:
        return f.default
    return f.default_factory()


def _config_from_args(args) -> ExperimentConfig:
    data = {}
    if args.config is not None:
        data.update(json.loads(args.config.read_text()))
    names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    data.update({k: v for k, v in vars(args).items() if k in names})
    return ExperimentConfig.from_dict(data)


def _builtin_suites():
    root = resources.files("grfstream") / "suites"
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def _read_suite(ref: str) -> dict:
    path = Path(ref)
    if path.exists():
        return json.loads(path.read_text())
    if ref in _builtin_suites():
        return json.loads((resources.files("grfstream") / "suites" / f"{ref}.json").read_text())
    raise FileNotFoundError(f"no suite file or built-in suite named {ref!r}")


def cmd_run(args) -> int:
    report = run_single(_config_from_args(args))
    record = report.record(not args.no_timing)
    if args.json:
        print(json.dumps(record, sort_keys=True))
    else:
        record.pop("kappa_trajectory")
        write_table([record], sys.stdout)
    return 0


def cmd_pair(args) -> int:
    config = _config_from_args(args)
    result = run_paired(config, n_jobs=args.jobs)
    columns = SUMMARY_COLUMNS if not args.no_timing else [c for c in SUMMARY_COLUMNS if not c.startswith("time_")]
    write_table([result.summary_row()], sys.stdout, columns=columns)
    if args.records:
        with open(args.records, "w") as fh:
            for row in result.run_records(not args.no_timing):
                fh.write(json.dumps(row, sort_keys=True) + "\n")
    return 0


def cmd_suite(args) -> int:
    if args.list:
        print("\n".join(_builtin_suites()))
        return 0
    if args.suite is None:
        raise ValueError("suite needs a file or built-in suite name (see --list)")
    configs = expand_suite(_read_suite(args.suite))
    if args.only:
        keep = {canonical_name(k) for k in args.only}
        configs = [c for c in configs if c.learner in keep]
    result = run_suite(configs, n_jobs=args.jobs)
    out = write_suite_outputs(result, args.out, with_timing=not args.no_timing)
    columns = LEARNER_COLUMNS if not args.no_timing else [c for c in LEARNER_COLUMNS if not c.startswith("time_")]
    write_table(result.learner_rows(), sys.stdout, columns=columns)
    log.info("wrote %s", out)
    for name, error in result.failures:
        print(f"FAILED {name}: {error}", file=sys.stderr)
    return 0 if result.ok else 1


def cmd_dump_grf(args) -> int:
    rows = dump_encoding_grid(args.i_min, args.i_max, GrfConfig(args.n_grfs, args.gamma), args.resolution)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_grid(rows, fh, args.delimiter)
    else:
        write_grid(rows, sys.stdout, args.delimiter)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grfstream", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one test-then-train run (GRF on or off per --use-grf)")
    _add_config_flags(p)
    p.add_argument("--json", action="store_true", help="print the report as one JSON object")
    p.add_argument("--no-timing", action="store_true", help="omit wall-clock fields")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("pair", help="baseline vs GRF over all repetitions, with McNemar")
    _add_config_flags(p)
    p.add_argument("--jobs", type=int, default=1, help="parallel repetitions")
    p.add_argument("--records", type=Path, help="write per-run records (JSON lines) here")
    p.add_argument("--no-timing", action="store_true", help="omit wall-clock fields")
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("suite", help="run every experiment of a suite file")
    p.add_argument("suite", nargs="?", help="suite JSON file or built-in suite name")
    p.add_argument("--out", type=Path, default=Path("results"), help="output directory (default: results)")
    p.add_argument("--jobs", type=int, default=1, help="parallel experiments")
    p.add_argument("--only", type=_items, help="comma separated learners to keep")
    p.add_argument("--no-timing", action="store_true", help="omit wall-clock columns")
    p.add_argument("--list", action="store_true", help="list built-in suites and exit")
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("dump-grf", help="tabulate the encoding curves of one feature range")
    p.add_argument("--i-min", type=float, default=0.0)
    p.add_argument("--i-max", type=float, default=1.0)
    p.add_argument("--n-grfs", type=int, default=3)
    p.add_argument("--gamma", type=float, default=2.0)
    p.add_argument("--resolution", type=int, default=101, help="number of x values")
    p.add_argument("--delimiter", default="\t")
    p.add_argument("--out", type=Path, help="write here instead of stdout")
    p.set_defaults(func=cmd_dump_grf)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"grfstream {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"grfstream {args.command}: run failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
