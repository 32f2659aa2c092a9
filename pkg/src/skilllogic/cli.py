"""Command-line front end.

Exit codes: 0 when the verdict is true (or the command succeeded), 1 when it
is false (or validation found problems), 2 on any input or usage error.
Diagnostics go to stderr; data goes to stdout.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from importlib import resources

from . import __version__
from .checker import Checker, sorted_worlds
from .dataset import abstract_frame, load_overlay, overlay, read_csv
from .generate import corpus
from .model import dumps_model, load_model_file, validate
from .oracle import naive_truth_set
from .reductions import REWRITES
from .syntax import length, parse, to_text
from .ueg import UegGraph, equivalence_check

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    pass


def _sha256(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _formula_text(arg: str) -> str:
    if arg.startswith("@"):
        with open(arg[1:]) as fh:
            return fh.read()
    return arg


def _report(args, inputs: dict[str, str], **fields) -> dict:
    out = {"command": args.command, "version": __version__,
           "inputs": {k: _sha256(p) for k, p in inputs.items()}}
    out.update(fields)
    return out


def _emit(args, report: dict, text_lines: list[str], started: float) -> None:
    if getattr(args, "timing", False):
        report["seconds"] = round(time.perf_counter() - started, 6)
    if getattr(args, "json", False):
        print(json.dumps(report, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def cmd_check(args) -> int:
    t0 = time.perf_counter()
    M = load_model_file(args.model)
    if args.world not in M.worlds:
        raise CliError(f"unknown world {args.world!r}")
    phi = parse(_formula_text(args.formula))
    truth = Checker(M).truth_set(phi)
    if args.oracle:
        naive = naive_truth_set(M, phi)
        if naive != truth:
            raise CliError("checker and naive evaluator disagree: "
                           f"{sorted_worlds(M, truth)} vs {sorted_worlds(M, naive)}")
    verdict = args.world in truth
    fields = {"world": args.world, "formula": to_text(phi), "verdict": verdict}
    lines = [str(verdict).lower()]
    if args.truth_set:
        ts = sorted_worlds(M, truth)
        fields["truth_set"] = ts
        lines.append(" ".join(ts))
    _emit(args, _report(args, {"model": args.model}, **fields), lines, t0)
    return EXIT_TRUE if verdict else EXIT_FALSE


def cmd_validate(args) -> int:
    t0 = time.perf_counter()
    M = load_model_file(args.model)
    problems = validate(M)
    lines = [str(p) for p in problems] or ["ok"]
    report = _report(args, {"model": args.model}, valid=not problems,
                     violations=[{"kind": p.kind, "detail": p.detail} for p in problems])
    _emit(args, report, lines, t0)
    return EXIT_FALSE if problems else EXIT_TRUE


def cmd_ueg(args) -> int:
    t0 = time.perf_counter()
    g = UegGraph.load(args.graph)
    r = equivalence_check(g, args.variant)
    report = _report(args, {"graph": args.graph}, variant=args.variant, **r.to_json())
    lines = [f"winner {r.winner}", f"model_check {str(r.verdict).lower()}",
             f"agree {str(r.agree).lower()}"]
    _emit(args, report, lines, t0)
    return EXIT_TRUE if r.agree else EXIT_FALSE


def cmd_reduce(args) -> int:
    t0 = time.perf_counter()
    if args.kind not in REWRITES:
        raise CliError(f"unknown rewriting {args.kind!r}; choose from {', '.join(REWRITES)}")
    phi = parse(_formula_text(args.formula))
    rho = REWRITES[args.kind](phi)
    report = _report(args, {}, kind=args.kind, formula=to_text(phi), rewritten=to_text(rho),
                     length=length(phi), rewritten_length=length(rho))
    lines = [to_text(rho), f"|phi| = {length(phi)}", f"|rho| = {length(rho)}"]
    _emit(args, report, lines, t0)
    return EXIT_TRUE


def cmd_abstract(args) -> int:
    table = read_csv(args.csv)
    frame = abstract_frame(table, diagonal=args.diagonal)
    caps, val = {}, {}
    if args.overlay:
        with open(args.overlay) as fh:
            caps, val = load_overlay(json.load(fh))
    text = dumps_model(overlay(frame, caps, val))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_TRUE


def _fixture(name: str) -> str:
    return str(resources.files("skilllogic") / "fixtures" / name)


def cmd_selftest(args) -> int:
    t0 = time.perf_counter()
    with open(_fixture("judgments.json")) as fh:
        judgments = json.load(fh)
    failures = []
    counts = {}
    for name, items in judgments.items():
        M = load_model_file(_fixture(name))
        ch = Checker(M)
        for item in items:
            got = item["world"] in ch.truth_set(parse(item["formula"]))
            if got != item["expected"]:
                failures.append(f"{name} {item['world']} {item['formula']}")
        counts[name] = len(items)
    if length(parse("(p -> C[a,b,c] q)")) != 13:
        failures.append("length convention")
    if not equivalence_check(UegGraph.load(_fixture("g0.json"))).agree:
        failures.append("ueg g0")
    pairs = corpus(size=args.pairs)
    for i, (M, phi) in enumerate(pairs):
        if Checker(M).truth_set(phi) != naive_truth_set(M, phi):
            failures.append(f"oracle pair {i}: {to_text(phi)}")
    counts["oracle_pairs"] = len(pairs)
    report = {"command": "selftest", "version": __version__, "checked": counts,
              "failures": failures}
    lines = [f"FAIL {f}" for f in failures] + [f"{len(failures)} failure(s)"]
    _emit(args, report, lines, t0)
    return EXIT_FALSE if failures else EXIT_TRUE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skilllogic", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="print a JSON report")
        sp.add_argument("--timing", action="store_true", help="include wall-clock seconds")
        return sp

    c = common(sub.add_parser("check", help="model-check a formula at a world"))
    c.add_argument("model")
    c.add_argument("world")
    c.add_argument("formula", help="formula text, or @file")
    c.add_argument("--truth-set", action="store_true", help="also print every satisfying world")
    c.add_argument("--oracle", action="store_true",
                   help="cross-check against the naive evaluator")
    c.set_defaults(func=cmd_check)

    v = common(sub.add_parser("validate", help="check a model file's well-formedness"))
    v.add_argument("model")
    v.set_defaults(func=cmd_validate)

    u = common(sub.add_parser("ueg", help="compare game solver and induced model check"))
    u.add_argument("graph")
    u.add_argument("--variant", choices=("plus", "any", "minus"), default="plus")
    u.set_defaults(func=cmd_ueg)

    r = common(sub.add_parser("reduce", help="apply a satisfiability-preserving rewriting"))
    r.add_argument("kind", help=", ".join(REWRITES))
    r.add_argument("formula", help="formula text, or @file")
    r.set_defaults(func=cmd_reduce)

    a = sub.add_parser("abstract", help="build a model from an attribute table")
    a.add_argument("csv")
    a.add_argument("overlay", nargs="?", help="JSON with capabilities and valuation")
    a.add_argument("--diagonal", choices=("full", "attributes"), default="full")
    a.add_argument("-o", "--output")
    a.set_defaults(func=cmd_abstract)

    s = common(sub.add_parser("selftest", help="run the bundled fixtures and oracle corpus"))
    s.add_argument("--pairs", type=int, default=50)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_TRUE
    try:
        return args.func(args)
    except (CliError, ValueError, KeyError, OSError, RecursionError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
