"""Command-line driver: run scenarios, list the catalog, explain checks.

Exit codes: 0 all checks pass, 1 at least one check failed, 2 usage or
parse/validation error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ScenarioFormatError
from .scenarios import CHECKS, list_builtins, run_scenario


def _cmd_run(args) -> int:
    try:
        report = run_scenario(args.scenario, seed=args.seed, output_dir=args.out,
                              tol_scale=args.tol_scale)
    except ScenarioFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for record in report["checks"]:
        status = "PASS" if record.get("pass") else "FAIL"
        detail = ""
        if record.get("error"):
            detail = f"  [{record['error']}]"
        else:
            residuals = record.get("residuals", {})
            if residuals:
                shown = ", ".join(
                    f"{k}={v:.3e}" if isinstance(v, float) else f"{k}={v}"
                    for k, v in residuals.items())
                detail = f"  ({shown})"
        print(f"{status}  {record['id']}{detail}")
    print(f"overall: {'PASS' if report['overall_pass'] else 'FAIL'} "
          f"(scenario {report['scenario']['name']}, seed {report['scenario']['seed']})")
    return 0 if report["overall_pass"] else 1


def _cmd_list(_args) -> int:
    catalog = list_builtins()
    for section in ("groups", "field_kinds", "map_kinds", "checks", "scenarios"):
        print(f"{section}:")
        for item in catalog[section]:
            print(f"  {item}")
    return 0


def _cmd_explain(args) -> int:
    name = args.check
    if name not in CHECKS:
        print(f"error: unknown check {name!r}; see `invfields list`", file=sys.stderr)
        return 2
    _, identity, description = CHECKS[name]
    print(f"check:    {name}")
    print(f"verifies: {identity}")
    print(f"meaning:  {description}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="invfields",
        description="Verification suites for invariant vector fields on "
                    "compact matrix-group representations.")
    sub = parser.add_subparsers(dest="command")

    run_p = sub.add_parser("run", help="run a scenario (builtin name or JSON path)")
    run_p.add_argument("scenario")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override the scenario seed")
    run_p.add_argument("--out", default=None, help="output directory for reports")
    run_p.add_argument("--tol-scale", type=float, default=1.0,
                       help="multiply every tolerance by this factor")
    run_p.set_defaults(func=_cmd_run)

    list_p = sub.add_parser("list", help="list groups, field kinds, checks, scenarios")
    list_p.set_defaults(func=_cmd_list)

    explain_p = sub.add_parser("explain", help="print the identity a check verifies")
    explain_p.add_argument("check")
    explain_p.set_defaults(func=_cmd_explain)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except ScenarioFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
