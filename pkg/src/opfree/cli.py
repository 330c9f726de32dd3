"""
Command-line entry point.

    opfree run SCENARIO [--seed N] [--tol X] [--depth D] [--trials T] [--out FILE]
    opfree list
    opfree schema {scenario,report}

``SCENARIO`` is a path to a JSON scenario or the name of a bundled one.
Exit codes: 0 when every check passes, 1 when a check fails or is
inconclusive, 2 for unreadable, malformed or schema-violating scenarios.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import scenario as sc
from .exceptions import ScenarioError
from .report import REPORT_JSON_SCHEMA

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_SCHEMA = 2


def _resolve(name):
    path = Path(name)
    if path.exists() or name.endswith(".json") or "/" in name:
        return path
    if name in sc.bundled_names():
        return sc.bundled_path(name)
    raise ScenarioError(f"no scenario file {name!r} and no bundled scenario of that name; "
                        f"bundled: {', '.join(sc.bundled_names())}")


def run(scenario_path, seed=None, tol=None, depth=None, trials=None, out=None,
        include_timing=True, stream=None):
    """Run one scenario; return ``(exit_code, report)`` (report None on exit 2)."""
    stream = sys.stdout if stream is None else stream
    try:
        data = sc.load(_resolve(scenario_path))
        overrides = {"seed": seed, "tol": tol, "depth": depth, "trials": trials}
        report = sc.run_scenario(data, overrides)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA, None
    print(report.table(), file=stream)
    if out is not None:
        Path(out).write_text(report.to_json(include_timing) + "\n")
    return (EXIT_OK if report.passed else EXIT_FAIL), report


def build_parser():
    parser = argparse.ArgumentParser(prog="opfree", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a JSON scenario")
    p_run.add_argument("scenario", help="scenario file or bundled scenario name")
    p_run.add_argument("--seed", type=int, default=None,
                       help=f"base seed (default: payload value or {sc.DEFAULT_SEED})")
    p_run.add_argument("--tol", type=float, default=None,
                       help="tolerance (default: payload value or 1e-10)")
    p_run.add_argument("--depth", type=int, default=None,
                       help="Fock truncation depth (default: longest word + 1 per suite)")
    p_run.add_argument("--trials", type=int, default=None,
                       help=f"random trials (default: payload value or {sc.DEFAULT_TRIALS})")
    p_run.add_argument("--out", default=None, help="write the JSON report here")
    p_run.add_argument("--no-timing", action="store_true",
                       help="omit the timing field from the JSON report")

    sub.add_parser("list", help="list bundled scenarios")

    p_schema = sub.add_parser("schema", help="print a JSON schema")
    p_schema.add_argument("which", choices=["scenario", "report"])
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "list":
        for name in sc.bundled_names():
            print(name)
        return EXIT_OK
    if args.command == "schema":
        if args.which == "report":
            doc = REPORT_JSON_SCHEMA
        else:
            doc = {"scenario": sc.SCENARIO_SCHEMA, "payloads": sc.PAYLOAD_SCHEMAS,
                   "verify_suites": sc.SUITE_SCHEMAS}
        print(json.dumps(doc, indent=2, sort_keys=True))
        return EXIT_OK
    code, _ = run(args.scenario, args.seed, args.tol, args.depth, args.trials, args.out,
                  include_timing=not args.no_timing)
    return code


if __name__ == "__main__":
    sys.exit(main())
