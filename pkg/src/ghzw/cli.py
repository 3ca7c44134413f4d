"""Command-line front end: ``ghzw <command> ...``.

Exit codes: 0 success, 1 a check failed (unsound rule, arithmetic
mismatch, diagrams not isomorphic), 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from . import arith, io
from .bang import builtin_pattern_rules, count_vectors, expand_rule, pattern_rule
from .diagram import Diagram, is_isomorphic
from .errors import GhzwError
from .rewrite import STRATEGIES, find_matches, apply_match, normalize
from .rules import builtin_rules, check_rule_soundness, sample_environments
from .semantics import evaluate, scalar_value

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class _Report:
    def __init__(self, command: str, as_json: bool):
        self.command = command
        self.as_json = as_json
        self.details: list = []
        self.passed = True

    def line(self, text: str, **data):
        if self.as_json:
            self.details.append(data or {"message": text})
        else:
            print(text)

    def fail(self):
        self.passed = False

    def finish(self) -> int:
        if self.as_json:
            print(json.dumps({"command": self.command, "pass": self.passed, "details": self.details}, indent=2))
        return EXIT_OK if self.passed else EXIT_FAIL


def _read_diagram(path: str) -> tuple[Diagram, dict]:
    obj, params = io.parse_with_params(Path(path).read_text())
    if not isinstance(obj, Diagram):
        raise GhzwError(f"{path} does not hold a plain diagram")
    return obj, params


def _env(args, params: dict) -> dict:
    env = dict(params)
    if getattr(args, "env", None):
        env.update(io.parse_environment(Path(args.env).read_text()))
    return env


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _lookup_rule(name: str):
    rules = builtin_rules()
    if name in rules:
        return rules[name]
    m = re.fullmatch(r"(\w+)\[(.*)\]", name)
    if m:
        counts = {}
        for part in filter(None, m.group(2).split(",")):
            key, _, val = part.partition("=")
            counts[key.strip()] = int(val)
        return expand_rule(pattern_rule(m.group(1)), counts)
    raise KeyError(f"unknown rule {name!r}")


# ---------------------------------------------------------------- commands


def cmd_eval(args) -> int:
    d, params = _read_diagram(args.file)
    t = evaluate(d, _env(args, params))
    rep = _Report("eval", args.json)
    rep.line(f"signature {t.n_inputs} -> {t.n_outputs}", signature=list(t.signature))
    if args.json:
        rep.details.append({"entries": [str(x) for x in t.entries]})
    else:
        print(str(t))
    return rep.finish()


def cmd_scalar(args) -> int:
    d, params = _read_diagram(args.file)
    value = scalar_value(d, _env(args, params))
    rep = _Report("scalar", args.json)
    rep.line(str(value), value=str(value))
    return rep.finish()


def cmd_check_rules(args) -> int:
    rep = _Report("check-rules", args.json)
    concrete = list(builtin_rules())
    for pr in builtin_pattern_rules():
        concrete += [expand_rule(pr, c) for c in count_vectors(pr, args.max_count)]
    for rule in concrete:
        envs = sample_environments(rule.params, n_random=args.samples, seed=args.seed)
        report = check_rule_soundness(rule, envs)
        status = "ok" if report.passed else "FAIL"
        if not report.passed:
            rep.fail()
        if args.json:
            rep.details.append({"rule": rule.name, "pass": report.passed, "samples": len(envs)})
        elif args.verbose or not report.passed:
            print(f"{status:4} {rule.name}")
    rep.line(
        f"{len(concrete)} rules checked: {'all sound' if rep.passed else 'FAILURES'}",
        summary=len(concrete),
    )
    return rep.finish()


def cmd_rewrite(args) -> int:
    d, params = _read_diagram(args.file)
    rule = _lookup_rule(args.rule)
    matches = find_matches(rule, d)
    if args.match >= len(matches):
        print(f"rule {rule.name} has {len(matches)} match(es); no match {args.match}", file=sys.stderr)
        return EXIT_FAIL
    out = apply_match(rule, d, matches[args.match])
    _write(io.serialize(out, params or None), args.out)
    return EXIT_OK


def cmd_normalize(args) -> int:
    d, params = _read_diagram(args.file)
    out, trace = normalize(d, args.strategy, args.max_steps)
    rep = _Report("normalize", args.json)
    for step in trace.steps:
        rep.line(str(step), rule=step.rule, match=step.fingerprint)
    status = "step limit reached" if trace.step_limit_exceeded else "no rule applies"
    rep.line(f"{len(trace)} step(s), {status}", steps=len(trace), step_limit_exceeded=trace.step_limit_exceeded)
    if args.out:
        Path(args.out).write_text(io.serialize(out, params or None))
    return rep.finish()


def cmd_encode(args) -> int:
    _write(io.serialize(arith.encode(args.value)), args.out)
    return EXIT_OK


def cmd_decode(args) -> int:
    d, params = _read_diagram(args.file)
    value = arith.decode(d, _env(args, params))
    rep = _Report("decode", args.json)
    rep.line(str(value), value=str(value))
    return rep.finish()


def cmd_arith(args) -> int:
    _, got, want = arith.eval_expression(args.expr)
    rep = _Report("arith", args.json)
    ok = got == want
    if not ok:
        rep.fail()
    rep.line(f"{got} == {want} {'OK' if ok else 'MISMATCH'}", diagram=str(got), oracle=str(want))
    return rep.finish()


def cmd_iso(args) -> int:
    a, _ = _read_diagram(args.first)
    b, _ = _read_diagram(args.second)
    same = is_isomorphic(a, b)
    rep = _Report("iso", args.json)
    if not same:
        rep.fail()
    rep.line("isomorphic" if same else "not isomorphic", isomorphic=same)
    return rep.finish()


def cmd_dot(args) -> int:
    d, _ = _read_diagram(args.file)
    _write(io.to_dot(d), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ghzw", description="GHZ/W calculus rewriting and exact semantics")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--json", action="store_true", help="machine-readable report")
        p.set_defaults(func=func)
        return p

    p = add("eval", cmd_eval, "print the exact tensor of a diagram")
    p.add_argument("file")
    p.add_argument("--env", help="JSON file mapping parameter names to [[p,q],[p,q]]")

    p = add("scalar", cmd_scalar, "print the value of a closed diagram")
    p.add_argument("file")
    p.add_argument("--env")

    p = add("check-rules", cmd_check_rules, "run the soundness oracle over every shipped rule")
    p.add_argument("--samples", type=int, default=20, help="random environments per rule")
    p.add_argument("--max-count", type=int, default=4, help="largest !-box count to expand")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-v", "--verbose", action="store_true")

    p = add("rewrite", cmd_rewrite, "apply one rule at one match")
    p.add_argument("file")
    p.add_argument("--rule", required=True, help="rule name, e.g. ghz_special or ghz_fusion[a=1,b=2]")
    p.add_argument("--match", type=int, default=0)
    p.add_argument("--out")

    p = add("normalize", cmd_normalize, "rewrite with a strategy until no rule applies")
    p.add_argument("file")
    p.add_argument("--strategy", choices=STRATEGIES, default="simplify")
    p.add_argument("--max-steps", type=int, default=100)
    p.add_argument("--out")

    p = add("encode", cmd_encode, "diagram of a rational P/Q")
    p.add_argument("value")
    p.add_argument("--out")

    p = add("decode", cmd_decode, "rational denoted by a (0,1) diagram")
    p.add_argument("file")
    p.add_argument("--env")

    p = add("arith", cmd_arith, "compile an expression and compare with exact arithmetic")
    p.add_argument("expr")

    p = add("iso", cmd_iso, "check two diagrams for isomorphism")
    p.add_argument("first")
    p.add_argument("second")

    p = add("dot", cmd_dot, "Graphviz dump of a diagram")
    p.add_argument("file")
    p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GhzwError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
