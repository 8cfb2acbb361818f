"""Command line: ``ferrand --input script.fer [--json report.json]``."""

from __future__ import annotations

import argparse
import sys
from importlib import resources

from .config import using
from .dsl import parse
from .errors import ParseError
from .poly import field_from_tag
from .runner import run


def corpus_script(name):
    """Text of a script shipped in the package corpus (``nodal`` or ``nodal.fer``)."""
    if not name.endswith(".fer"):
        name += ".fer"
    return resources.files("ferrand").joinpath("corpus", name).read_text(encoding="utf-8")


def corpus_names():
    return sorted(p.name for p in resources.files("ferrand").joinpath("corpus").iterdir() if p.name.endswith(".fer"))


def build_parser():
    p = argparse.ArgumentParser(prog="ferrand", description="Run a pushout script and report verdicts.")
    p.add_argument("--input", required=True, help="script file, '-' for stdin, or corpus:<name> for a shipped script")
    p.add_argument("--json", metavar="FILE", help="write the JSON report here ('-' for stdout)")
    p.add_argument("--degree-bound", type=int, default=64, metavar="N")
    p.add_argument("--probe-degree", type=int, default=8, metavar="N")
    p.add_argument("--field", default="QQ", help="QQ or Fp:<p>; used where a script writes k")
    p.add_argument("--fail-fast", action="store_true", help="stop at the first FAIL with a partial report")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--parallel", action="store_true", help="run independent commands concurrently")
    p.add_argument("--quiet", action="store_true", help="suppress the per-record lines")
    return p


def _read(source):
    if source == "-":
        return sys.stdin.read()
    if source.startswith("corpus:"):
        return corpus_script(source[len("corpus:"):])
    with open(source, encoding="utf-8") as fh:
        return fh.read()


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        fld = field_from_tag(args.field)
        if args.degree_bound < 1 or args.probe_degree < 0:
            raise ValueError("bounds must be positive")
    except ValueError as exc:
        print(f"ferrand: {exc}", file=sys.stderr)
        return 2
    try:
        text = _read(args.input)
    except OSError as exc:
        print(f"ferrand: cannot read {args.input}: {exc}", file=sys.stderr)
        return 2
    try:
        script = parse(text)
    except ParseError as exc:
        print(f"ferrand: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    echo = None if args.quiet or args.json == "-" else print
    with using(degree_bound=args.degree_bound, probe_degree=args.probe_degree, seed=args.seed):
        report = run(script, field=fld, fail_fast=args.fail_fast, parallel=args.parallel, echo=echo)
    if args.json == "-":
        sys.stdout.write(report.to_json())
    elif args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    if echo:
        d = report.to_dict()["summary"]
        status = "" if report.complete else " (stopped early)"
        print(f"{d['pass']} passed, {d['fail']} failed{status}")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
