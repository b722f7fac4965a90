"""Command-line scenario runner.

Subcommands route a config file to the matching pipeline:

  exact   family construction + residual certification
  ode     angular-profile integration / periodic shooting
  solve   semilinear elliptic rigidity demo
  verify  certification checks on a supplied field CSV
  slide   translation-comparison positivity check
  batch   run a list of scenario configs into isolated directories

Exit codes: 0 all checks passed, 1 at least one check failed,
2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigError
from .scenarios import parse_config, run_batch, run_scenario

_SUBCOMMAND_TAGS = {
    "exact": {
        "AppendixAtlas",
        "Thm2_A2",
        "Thm2_A3",
        "Thm2_A4",
        "Thm3",
        "Thm4_B1",
        "Thm4_B2",
        "Thm4_B3",
        "Thm4_B4",
        "Thm5i",
        "Thm5ii",
    },
    "ode": {"Cor1"},
    "solve": {"Thm1i", "Thm1ii", "Thm2_A1"},
    "verify": {"Verify"},
    "slide": {"Slide"},
}

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL = 3


def _add_common(sub):
    sub.add_argument("--config", required=True, help="scenario config (INI or JSON)")
    sub.add_argument("--out", default="out", help="output directory")
    sub.add_argument("--seed", type=int, default=None, help="perturbation seed override")
    sub.add_argument("--tol", type=float, default=None, help="solver tolerance override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sectorflow",
        description="Construct, solve, and certify homogeneous Euler flows "
        "on sector domains.",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("exact", "ode", "solve", "verify", "slide", "batch"):
        sub = subs.add_parser(name)
        _add_common(sub)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "batch":
            code, summary = run_batch(args.config, args.out)
            for item in summary["scenarios"]:
                status = "pass" if item["exit_code"] == 0 else f"exit {item['exit_code']}"
                print(f"{item['name']}: {status}")
            return code
        scn = parse_config(args.config)
        allowed = _SUBCOMMAND_TAGS[args.command]
        if scn.tag not in allowed:
            raise ConfigError(
                f"tag {scn.tag!r} is not runnable by '{args.command}' "
                f"(expected one of {sorted(allowed)})"
            )
        if args.seed is not None:
            scn.solver["seed"] = str(args.seed)
        if args.tol is not None:
            scn.solver["tol"] = repr(args.tol)
        code, report = run_scenario(scn, Path(args.out))
        if "error" in report:
            print(f"{scn.name}: numerical failure: {report['error']}")
            return EXIT_NUMERICAL
        for check in report["checks"]:
            mark = "PASS" if check["passed"] else "FAIL"
            print(f"[{mark}] {check['name']}: {check['value']!r}")
        print(f"{scn.name}: {'pass' if code == 0 else 'FAIL'}")
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
