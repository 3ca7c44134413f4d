"""Acceptance criteria, one timed check each.

Every check returns ``(ok, detail)``.  The pytest wrappers assert both the
outcome and the time limit, and record a PASS/FAIL line that
``conftest.py`` prints at the end of the session.  Running this file
directly prints the same twelve lines.
"""
import itertools
import os
import random
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from ghzw import GHZ, W, Tensor, evaluate, is_isomorphic, proj_equal, shapes, validate
from ghzw import io
from ghzw.arith import ArithOp, ExtendedRational, INFINITY, apply_arith, decode, encode_nat, encode_rational, neg, add
from ghzw.bang import (
    builtin_pattern_rules,
    copy_box,
    count_vectors,
    drop_box,
    expand_rule,
    instantiate,
    kill_box,
    merge_boxes,
    nat_pattern,
)
from ghzw.cli import main as cli_main
from ghzw.diagram import relabel
from ghzw.fuzz import embed, random_diagram
from ghzw.rewrite import apply_match, find_matches
from ghzw.rules import (
    builtin_rules,
    check_rule_soundness,
    pendant_scalars,
    sample_environments,
    theorem_delta,
    verify_by_plugging,
)

RESULTS = {}

LIMITS = {1: 1, 2: 1, 3: 30, 4: 10, 5: 30, 6: 1, 7: 5, 8: 60, 9: 10, 10: 5, 11: 5, 12: 30}

TITLES = {
    1: "generator fidelity",
    2: "structure laws",
    3: "rule soundness sweep",
    4: "theorems delta1-delta3",
    5: "arithmetic homomorphism",
    6: "encoding model law",
    7: "well-definedness of encodings",
    8: "DPO semantics preservation",
    9: "!-box semantics",
    10: "additive inverse",
    11: "plugging verifier",
    12: "round-trip and determinism",
}


# ---------------------------------------------------------------- 1


def check_generators():
    expected = {
        ("ghz", "unit"): Tensor.from_matrix([[1], [1]]),
        ("ghz", "counit"): Tensor.from_matrix([[1, 1]]),
        # |0><00| + |1><11|
        ("ghz", "mult"): Tensor.from_matrix([[1, 0, 0, 0], [0, 0, 0, 1]]),
        ("ghz", "comult"): Tensor.from_matrix([[1, 0], [0, 0], [0, 0], [0, 1]]),
        ("w", "unit"): Tensor.from_matrix([[0], [1]]),
        ("w", "counit"): Tensor.from_matrix([[1, 0]]),
        # |1><11| + |0><01| + |0><10|
        ("w", "mult"): Tensor.from_matrix([[0, 1, 1, 0], [0, 0, 0, 1]]),
        ("w", "comult"): Tensor.from_matrix([[1, 0], [0, 1], [0, 1], [0, 0]]),
    }
    bad = []
    for (colour, gen), want in expected.items():
        kind = GHZ if colour == "ghz" else W
        got = evaluate(getattr(shapes, gen)(kind))
        if got != want:
            bad.append(f"{colour} {gen}")
    return not bad, "8 generators exact" if not bad else f"mismatch: {bad}"


# ---------------------------------------------------------------- 2


def check_structure_laws():
    rules = builtin_rules()
    problems = []
    if evaluate(shapes.loop_map(GHZ)) != evaluate(shapes.wire()):
        problems.append("GHZ loop map")
    rep = check_rule_soundness(rules["w_antispecial"])
    if not (rep.passed and all(e.lam == 1 for e in rep.entries)):
        problems.append("w_antispecial")
    if evaluate(shapes.tick_composite(W, GHZ)).matrix() != [[0, 1], [1, 0]]:
        problems.append("tick composite")
    for name in ("alpha", "beta", "gamma", "xi", "beta_prime"):
        if not check_rule_soundness(rules[name]).passed:
            problems.append(name)
    return not problems, "loop map, anti-special, tick = X, alpha..beta_prime" if not problems else f"failed: {problems}"


# ---------------------------------------------------------------- 3


def check_soundness_sweep():
    failed = [r.name for r in builtin_rules() if not check_rule_soundness(r).passed]
    n = len(builtin_rules())
    for pr in builtin_pattern_rules():
        for counts in count_vectors(pr, 4):
            rule = expand_rule(pr, counts)
            n += 1
            if not check_rule_soundness(rule).passed:
                failed.append(rule.name)
    devnull = open(os.devnull, "w")
    old, sys.stdout = sys.stdout, devnull
    try:
        code = cli_main(["check-rules"])
    finally:
        sys.stdout = old
        devnull.close()
    ok = not failed and code == 0
    return ok, f"{n} concrete rules sound, check-rules exit {code}" if ok else f"unsound: {failed[:5]} exit {code}"


# ---------------------------------------------------------------- 4


def check_theorems():
    envs = sample_environments(["psi"], n_random=20, seed=4)
    assert [envs[k]["psi"] for k in range(5)] == [(k, 1) for k in range(5)]
    problems = []
    for which in (1, 2, 3):
        exact = theorem_delta(which, exact=True)
        free = theorem_delta(which, exact=False)
        for env in envs:
            ok, lam = proj_equal(evaluate(exact.lhs, env), evaluate(exact.rhs, env))
            if not (ok and lam == 1):
                problems.append((which, "exact", env["psi"]))
            pend = [evaluate(s, env).entries[0] for s in pendant_scalars()[which]]
            if all(pend) and not proj_equal(evaluate(free.lhs, env), evaluate(free.rhs, env))[0]:
                problems.append((which, "free", env["psi"]))
    return not problems, f"3 theorems x {len(envs)} environments" if not problems else f"failed: {problems[:4]}"


# ---------------------------------------------------------------- 5


def _oracle(op, a, b=None):
    if op is ArithOp.ADD:
        return ExtendedRational.finite(a + b)
    if op is ArithOp.MUL:
        return ExtendedRational.finite(a * b)
    if op is ArithOp.NEG:
        return ExtendedRational.finite(-a)
    return INFINITY if a == 0 else ExtendedRational.finite(1 / a)


def check_arith_homomorphism():
    rng = random.Random(5)
    bad = []
    for _ in range(500):
        x = Fraction(rng.randint(-12, 12), rng.randint(1, 12))
        y = Fraction(rng.randint(-12, 12), rng.randint(1, 12))
        dx = encode_rational(x.numerator, x.denominator)
        dy = encode_rational(y.numerator, y.denominator)
        for op in ArithOp:
            args = [dx, dy] if op.arity == 2 else [dx]
            got = decode(apply_arith(op, args))
            if got != _oracle(op, x, y):
                bad.append((op.value, x, y))
    # n/m + n'/m' = (n m' + m n') / (m m'), on the unreduced encodings
    grid = 0
    for n, m, n2, m2 in itertools.product(range(4), range(1, 5), range(4), range(1, 5)):
        t = evaluate(add(encode_rational(n, m), encode_rational(n2, m2)))
        if not proj_equal(t, Tensor.from_ints(0, 1, [n * m2 + m * n2, m * m2]))[0]:
            bad.append(("grid", n, m, n2, m2))
        grid += 1
    return not bad, f"500 pairs x 4 ops, {grid}-point fraction-sum grid" if not bad else f"mismatch: {bad[:4]}"


# ---------------------------------------------------------------- 6


def check_encoding():
    bad = [n for n in range(21) if evaluate(encode_nat(n)).entries != (n, 1)]
    return not bad, "enc(n) = n|0> + |1> for n = 0..20" if not bad else f"bad n: {bad}"


# ---------------------------------------------------------------- 7


def check_well_defined():
    bad = []
    for p, q, k in itertools.product(range(-2, 3), range(1, 6), (2, 3)):
        if not proj_equal(evaluate(encode_rational(p, q)), evaluate(encode_rational(p * k, q * k)))[0]:
            bad.append((p, q, k))
    return not bad, "5x5 grid, k in {2, 3}" if not bad else f"bad: {bad}"


# ---------------------------------------------------------------- 8


def _rule_pool():
    pool = list(builtin_rules())
    for pr in builtin_pattern_rules():
        pool += [expand_rule(pr, c) for c in count_vectors(pr, 2)]
    return pool


def check_dpo():
    rng = random.Random(8)
    pool = _rule_pool()
    done, tries, bad = 0, 0, []
    while done < 200 and tries < 20000:
        tries += 1
        rule = rng.choice(pool)
        env = sample_environments(rule.params, n_random=1, seed=rng.randrange(1 << 30))[-1]
        host = embed(rng, rule.lhs, max_vertices=3)
        before = evaluate(host, env)
        if before.is_zero():
            continue
        matches = find_matches(rule, host)
        if not matches:
            continue
        out = apply_match(rule, host, rng.choice(matches))
        if validate(out) or not proj_equal(before, evaluate(out, env))[0]:
            bad.append(rule.name)
        done += 1
    ok = done == 200 and not bad
    return ok, f"{done} triples preserved ({tries} draws)" if ok else f"{done} triples, broken: {bad[:4]}"


# ---------------------------------------------------------------- 9


def _brute_force(pattern, max_vertices):
    """Every diagram reachable by COPY/MERGE/DROP/KILL sequences ending with no boxes."""
    results, stack, seen = [], [pattern], set()
    while stack:
        p = stack.pop()
        if len(p.base.vertices) > max_vertices:
            continue
        # neither box names nor vertex ids affect what a state can reach
        vmap = {vid: k for k, vid in enumerate(sorted(p.base.vertices))}
        boxes = tuple(sorted(
            (tuple(sorted(vmap[v] for v in b.vertices)), tuple(sorted(b.inputs)), tuple(sorted(b.outputs)))
            for b in p.boxes
        ))
        key = (io.serialize(relabel(p.base)), boxes)
        if key in seen:
            continue
        seen.add(key)
        if not p.boxes:
            if not any(is_isomorphic(p.base, r) for r in results):
                results.append(p.base)
            continue
        for bid in p.box_ids:
            stack.append(copy_box(p, bid))
            stack.append(drop_box(p, bid))
            stack.append(kill_box(p, bid))
        for a, b in itertools.combinations(p.box_ids, 2):
            stack.append(merge_boxes(p, a, b))
    return results


def check_bang():
    p = nat_pattern()
    family = [instantiate(p, {"n": k}) for k in range(4)]
    ok_family = all(is_isomorphic(d, encode_nat(k)) for k, d in enumerate(family))
    K = 3
    brute = _brute_force(p, 1 + K * 1)
    ok_brute = len(brute) == len(family) and all(any(is_isomorphic(b, d) for d in family) for b in brute)
    ok = ok_family and ok_brute
    return ok, f"family 0..3, brute force found {len(brute)} shapes" if ok else f"family {ok_family}, brute {len(brute)}"


# ---------------------------------------------------------------- 10


def check_additive_inverse():
    rng = random.Random(10)
    bad = []
    for _ in range(20):
        q = Fraction(rng.randint(-12, 12), rng.randint(1, 12))
        d = encode_rational(q.numerator, q.denominator)
        if decode(add(d, neg(d))) != 0:
            bad.append(q)
    crossed = shapes.seq_all(shapes.unit(W), shapes.wire(cross=1))
    fixes = evaluate(crossed) == evaluate(shapes.unit(W))
    ok = not bad and fixes
    return ok, "20 values cancel, cross fixes the black unit" if ok else f"bad {bad}, unit fixed {fixes}"


# ---------------------------------------------------------------- 11


def check_plugging():
    rule = theorem_delta(1, exact=True)
    envs = sample_environments(["psi"], n_random=5, seed=11)
    ok_delta = all(verify_by_plugging(rule.lhs, rule.rhs, 0, "black", env) for env in envs)
    rejected = not verify_by_plugging(shapes.mult(GHZ), shapes.mult(W), 0, "black")
    ok = ok_delta and rejected
    return ok, f"delta1 verified in {len(envs)} environments, unequal pair rejected" if ok else f"delta1 {ok_delta}, rejected {rejected}"


# ---------------------------------------------------------------- 12

_NORMALIZE_SCRIPT = """
import random, sys
from ghzw import io
from ghzw.arith import eval_expression
from ghzw.fuzz import random_diagram
from ghzw.rewrite import normalize
rng = random.Random(12)
hosts = [random_diagram(rng, max_vertices=6, decorate=False) for _ in range(15)]
hosts += [eval_expression(e)[0] for e in ("1 + 2", "2 * 3 + 1", "(1 + 1) * 2")]
for strat in ("simplify", "arith"):
    for d in hosts:
        out, trace = normalize(d, strat, max_steps=30)
        sys.stdout.write(trace.to_text())
        sys.stdout.write(io.serialize(out))
"""


def check_round_trip():
    rng = random.Random(1212)
    bad = 0
    for _ in range(1000):
        d = random_diagram(rng, max_vertices=10, params=("p", "q"))
        text = io.serialize(d)
        back = io.parse(text)
        if not is_isomorphic(back, d) or io.serialize(back) != text:
            bad += 1
    runs = []
    for seed in ("1", "2"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        out = subprocess.run([sys.executable, "-c", _NORMALIZE_SCRIPT], env=env, capture_output=True, check=True)
        runs.append(out.stdout)
    same = runs[0] == runs[1]
    ok = bad == 0 and same
    return ok, f"1000 round-trips, traces identical ({len(runs[0])} bytes)" if ok else f"{bad} round-trip failures, identical {same}"


CHECKS = {
    1: check_generators,
    2: check_structure_laws,
    3: check_soundness_sweep,
    4: check_theorems,
    5: check_arith_homomorphism,
    6: check_encoding,
    7: check_well_defined,
    8: check_dpo,
    9: check_bang,
    10: check_additive_inverse,
    11: check_plugging,
    12: check_round_trip,
}


def run_criterion(k):
    t0 = time.perf_counter()
    ok, detail = CHECKS[k]()
    elapsed = time.perf_counter() - t0
    in_time = elapsed < LIMITS[k]
    verdict = "PASS" if ok and in_time else "FAIL"
    line = f"[{k:2d}] {verdict} {TITLES[k]}: {detail} ({elapsed:.2f} s, limit {LIMITS[k]} s)"
    RESULTS[k] = line
    return ok, in_time, line


@pytest.mark.parametrize("k", sorted(CHECKS), ids=lambda k: f"criterion{k:02d}")
def test_criterion(k):
    ok, in_time, line = run_criterion(k)
    print(line)
    assert ok, line
    assert in_time, line


if __name__ == "__main__":
    failures = 0
    for k in sorted(CHECKS):
        ok, in_time, line = run_criterion(k)
        failures += not (ok and in_time)
        print(line)
    sys.exit(1 if failures else 0)
