"""Command-line runner: parse a config, run its suite, emit the files.

Exit codes: 0 when every asserted check holds (a hypothesis-not-met
verdict counts as success), 1 when an asserted inequality is violated,
2 for config errors and numerical failures.  Nothing is written before
the config parses and the suite completes, so a failing invocation
leaves no partial output directory behind.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, load_config
from .suites import SUITE_DESCRIPTIONS, SUITES, emit_report, run_suite


def format_summary(result):
    """Fixed-width text table: check, worst margin, tolerance, verdict."""
    rows = [("check", "worst margin", "tolerance", "verdict")]
    for c in result.checks:
        rows.append((c.slug, "%+.6g" % c.worst, "%.3g" % c.tolerance, c.verdict))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(col.ljust(widths[j]) for j, col in enumerate(row)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="harnacklab",
        description="numerical laboratory for kernel bounds and reduced-volume monotonicity",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run the experiment suite named in a config file")
    run_p.add_argument("config", help="path to a key = value config with bracket sections")
    run_p.add_argument("--out", default=None, help="output directory (overrides the config)")
    run_p.add_argument("--seed", type=int, default=None, help="seed recorded in output headers")
    run_p.add_argument(
        "--resolution",
        type=float,
        default=None,
        metavar="MULT",
        help="resolution multiplier (overrides the config)",
    )
    sub.add_parser("list-suites", help="print the registered suites, one per line")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)

    if args.command == "list-suites":
        for name in SUITES:
            print("%-20s %s" % (name, SUITE_DESCRIPTIONS[name]))
        return 0

    try:
        cfg = load_config(args.config)
        overrides = {}
        if args.out is not None:
            overrides["out_dir"] = args.out
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.resolution is not None:
            if not args.resolution > 0:
                raise ConfigError("resolution multiplier must be positive")
            overrides["resolution_multiplier"] = args.resolution
        if overrides:
            cfg = replace(cfg, **overrides)
        result = run_suite(cfg)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except (RuntimeError, FloatingPointError, ValueError) as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return 2

    try:
        files = emit_report(result, cfg, Path(cfg.out_dir))
    except (OSError, ValueError) as exc:
        print("report emission failed: %s" % exc, file=sys.stderr)
        return 2

    print("suite: %s   (seed %d, config %s)" % (result.suite, cfg.seed, cfg.config_hash))
    print(format_summary(result))
    print("wrote %d files to %s" % (len(files), cfg.out_dir))
    return result.exit_code


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
