"""Command-line entry point: ``g2glue <subcommand> --config FILE``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import __version__
from .config import ParseError, ValidationError, parse_config
from .report import ERROR, Report, emit_report, run, run_examples

SUBCOMMANDS = ("g2check", "analyze", "regularity", "gluing", "topology", "examples")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="g2glue", description="Exact checks for gluing data on flat G2-orbifolds T^7/Gamma.")
    p.add_argument("--version", action="version", version=f"g2glue {__version__}")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", help="job configuration (TOML)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--bound", type=int, help="closure bound (overrides [options].bound)")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--update-golden", action="store_true", help="examples: rewrite the golden files")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = None
    if args.subcommand == "examples":
        report = run_examples(update_golden=args.update_golden)
    else:
        try:
            if args.config:
                cfg = parse_config(args.config)
                if args.bound is not None:
                    if args.bound < 1:
                        raise ValidationError("--bound", "expected a positive integer")
                    cfg.options = replace(cfg.options, bound=args.bound)
        except (OSError, ParseError, ValidationError) as exc:
            report = Report(args.subcommand, "")
            report.demote(ERROR, str(exc))
        else:
            report = run(cfg, args.subcommand)
    data = emit_report(report, args.format)
    out = args.out or (cfg.options.out if cfg is not None else None)
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
