"""Command-line entry point.

    galelab trace|dimest|p2s|selective|liftpair --config <path> [--seed N] [--out DIR]

The config is JSON; see the README for the schema of each command.
Exit codes: 0 all checks passed, 2 a checked property was violated,
1 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, GaleLabError, PropertyViolation
from .experiments import COMMANDS, run_command

USAGE_ERROR = 1
VIOLATION = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="galelab",
        description="Exact gale experiments: traces, dimension estimates, "
        "oracle matrices, selective betting, pair lifts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in sorted(COMMANDS):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a JSON config")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config's seed")
        p.add_argument("--out", default=None,
                       help="output directory (default: config 'out' or ./out)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"galelab: cannot read config: {exc}", file=sys.stderr)
        return USAGE_ERROR
    out_dir = args.out or config.get("out", "out")
    try:
        result = run_command(args.command, config, out_dir, seed=args.seed)
    except (ConfigError, PropertyViolation, GaleLabError) as exc:
        code = VIOLATION if isinstance(exc, PropertyViolation) else USAGE_ERROR
        print(f"galelab {args.command}: {exc}", file=sys.stderr)
        return code

    for name in sorted(result.files):
        print(f"wrote {result.files[name]}")
    for violation in result.violations:
        print(f"violation: {violation}")
    print(f"{args.command}: {'ok' if result.exit_code == 0 else 'violations found'}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
