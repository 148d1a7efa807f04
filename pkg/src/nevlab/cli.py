"""Command line entry point: ``nevlab constants|position|verify|cartan -c cfg.json``."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import DegenerateCurve, HypothesisViolated, InvalidShape, NevlabError
from .harness import FAIL, PASS, VACUOUS, ExperimentConfig, emit_report, run_cartan, run_constants, run_position, run_verify

EXIT_PASS = 0
EXIT_ERROR = 1
EXIT_FAIL = 2
EXIT_POSITION = 3
EXIT_VACUOUS = 4
EXIT_HYPOTHESIS = 5


def _load(path):
    with open(path) as fh:
        return json.load(fh)


def _config(args):
    return ExperimentConfig.from_json(_load(args.config), seed=args.seed, trunc=args.trunc, tau=args.tol)


def _cmd_constants(args):
    consts = run_constants(_load(args.config))
    data = consts.to_json()
    print(json.dumps(data, indent=2, sort_keys=True))
    summary = f"L={consts.L} u={consts.u} B_bound={consts.B_bound} p0={consts.p0} L0: {consts.L0_digits} digits, leading {consts.L0_leading}"
    print(summary, file=sys.stderr)
    return EXIT_VACUOUS if consts.vacuous else EXIT_PASS


def _cmd_position(args):
    cfg = _config(args)
    out = run_position(cfg)
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_PASS if out["certificate"]["verdict"] == "Certified" else EXIT_POSITION


def _finish(report, args):
    if args.out:
        path = emit_report(report, args.out, args.format)
        print(f"{report.kind}: {report.verdict} -> {path}")
    elif args.format == "json":
        sys.stdout.write(report.dumps())
    else:
        print(",".join(report.header))
        for row in report.rows:
            print(",".join(format(v, ".12g") if isinstance(v, float) else str(v) for v in row))
    return {PASS: EXIT_PASS, FAIL: EXIT_FAIL, VACUOUS: EXIT_VACUOUS}[report.verdict]


def _cmd_verify(args):
    return _finish(run_verify(_config(args)), args)


def _cmd_cartan(args):
    return _finish(run_cartan(_config(args)), args)


def build_parser():
    parser = argparse.ArgumentParser(prog="nevlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {
        "constants": _cmd_constants,
        "position": _cmd_position,
        "verify": _cmd_verify,
        "cartan": _cmd_cartan,
    }
    for name, fn in handlers.items():
        p = sub.add_parser(name)
        p.add_argument("-c", "--config", required=True, help="JSON configuration file")
        p.add_argument("-o", "--out", default=None, help="output directory for the report")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--trunc", type=int, default=None, help="force a smaller truncation level")
        p.add_argument("--tol", type=float, default=None, help="tail tolerance tau")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HypothesisViolated as exc:
        print(f"hypothesis violated ({exc.kind}): {exc}", file=sys.stderr)
        return EXIT_POSITION if exc.kind == "position" else EXIT_HYPOTHESIS
    except DegenerateCurve as exc:
        print(f"degenerate curve: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (InvalidShape, NevlabError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
