"""Command-line entry points.

Subcommands: tomo, bell, afc, simulate, report.  Every flag can also be
given in a ``key = value`` config file (flags override the file).  On
failure a machine-readable error object is printed to stderr and the
exit code is nonzero.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .pipeline import PipelineConfig, cmd_afc, cmd_bell, cmd_report, cmd_simulate, cmd_tomo, report_to_json

_CONFIG_FIELDS = {f.name: f.type for f in dataclasses.fields(PipelineConfig)}


def parse_config_file(path) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def _coerce(key: str, value: str):
    if key in ("seed", "trials"):
        return int(value)
    if key in ("exact", "memory"):
        return value.lower() in ("1", "true", "yes", "on")
    return float(value)


def build_config(args) -> PipelineConfig:
    values = {}
    if getattr(args, "config", None):
        for key, raw in parse_config_file(args.config).items():
            if key not in _CONFIG_FIELDS:
                raise ValueError(f"unknown config key {key!r}")
            values[key] = _coerce(key, raw)
    overrides = {
        "seed": getattr(args, "seed", None),
        "trials": getattr(args, "trials", None),
        "assumed_n": getattr(args, "assumed_n", None),
        "exact": getattr(args, "exact", None) or None,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    return PipelineConfig(**values)


def _add_common(p):
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--seed", type=int, help="RNG seed (default 0)")
    p.add_argument("--trials", type=int, help="Monte-Carlo trials (default 1000)")
    p.add_argument("--assumed-n", dest="assumed_n", type=float,
                   help="assumed coincidences per setting for probability fixtures")
    p.add_argument("--out", help="write the JSON result to this path")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="echotomo",
        description="AFC photon-echo memory simulation and two-photon entanglement analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tomo", help="maximum-likelihood state reconstruction")
    p.add_argument("--dataset", required=True)
    _add_common(p)

    p = sub.add_parser("bell", help="CHSH S value from a correlation dataset")
    p.add_argument("--dataset", required=True)
    _add_common(p)

    p = sub.add_parser("afc", help="simulate pulse storage in the comb")
    _add_common(p)
    p.add_argument("--echo-csv", dest="echo_csv", help="write the echo trace CSV here")
    p.add_argument("--comb-csv", dest="comb_csv", help="write the comb profile CSV here")

    p = sub.add_parser("simulate", help="generate a synthetic counts dataset")
    _add_common(p)
    p.add_argument("--exact", action="store_true", help="expected counts instead of Poisson draws")

    p = sub.add_parser("report", help="full fixture analysis: state metrics, Bell tests, storage summary")
    _add_common(p)
    return parser


def run(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        config = build_config(args)
        if args.command == "tomo":
            result = cmd_tomo(args.dataset, config)
        elif args.command == "bell":
            result = cmd_bell(args.dataset, config)
        elif args.command == "afc":
            result = cmd_afc(config, echo_csv=args.echo_csv, comb_csv=args.comb_csv)
        elif args.command == "simulate":
            ds = cmd_simulate(config, out_path=args.out)
            result = ds.to_json()
        else:
            result = cmd_report(config)
        text = report_to_json(result)
        if args.command != "simulate" and args.out:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        if args.command == "simulate" and args.out:
            print(json.dumps({"written": args.out}))
        return 0
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        err = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        print(json.dumps(err), file=sys.stderr)
        return 1


def main():
    raise SystemExit(run())


if __name__ == "__main__":
    main()
