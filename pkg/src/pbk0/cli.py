"""Command line driver: ``pbk0 run``, ``pbk0 check`` and ``pbk0 corpus``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import Pbk0Error, ScenarioError
from .scenario import Config, parse_scenario, run_scenario
from .sheafcoh import DEFAULT_MAX_TWIST


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read scenario: {e.strerror}") from None


def cmd_run(args) -> int:
    s = parse_scenario(_read(args.scenario), args.field)
    report = run_scenario(s, Config(max_twist=args.max_twist, field=args.field))
    out = report.to_json() if args.format == "json" else report.to_text()
    if args.out:
        Path(args.out).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return report.exit_code


def cmd_check(args) -> int:
    s = parse_scenario(_read(args.scenario), args.field)
    print(f"ok: r={s.r}, base map {s.base_map}, {len(s.modules)} modules, {len(s.triples)} triples, {len(s.tasks)} tasks")
    return 0


def cmd_corpus(args) -> int:
    from .checks import corpus_report

    report = corpus_report(args.r, args.seed, args.max_twist)
    out = report.to_json() if args.format == "json" else report.to_text()
    sys.stdout.write(out)
    return report.exit_code


def build_parser():
    p = argparse.ArgumentParser(prog="pbk0", description="Certified computations with triples over projective bundles.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the tasks of a scenario file")
    run.add_argument("--scenario", required=True)
    run.add_argument("--format", choices=("text", "json"), default="text")
    run.add_argument("--out")
    run.add_argument("--max-twist", type=int, default=DEFAULT_MAX_TWIST)
    run.add_argument("--field", help="override the scenario field: q or fp:<p>")
    run.set_defaults(func=cmd_run)

    chk = sub.add_parser("check", help="parse and validate a scenario without running it")
    chk.add_argument("--scenario", required=True)
    chk.add_argument("--field")
    chk.set_defaults(func=cmd_check)

    cor = sub.add_parser("corpus", help="generate and check the randomized property corpus")
    cor.add_argument("--r", type=int, choices=(1, 2, 3), required=True)
    cor.add_argument("--seed", type=int, default=0)
    cor.add_argument("--format", choices=("text", "json"), default="text")
    cor.add_argument("--max-twist", type=int, default=DEFAULT_MAX_TWIST)
    cor.set_defaults(func=cmd_corpus)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Pbk0Error as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
