import random

import pytest

from ghzw import GHZ, W, evaluate, is_isomorphic, proj_equal, shapes, validate
from ghzw.arith import add, encode_nat
from ghzw.diagram import DiagramBuilder, compose_seq
from ghzw.errors import InvalidMatch
from ghzw.fuzz import embed
from ghzw.rewrite import Match, apply_match, find_matches, normalize, replay, strategy
from ghzw.rules import RewriteRule, builtin_rules

RULES = builtin_rules()


def test_ghz_special_matches_loop_map_once():
    assert len(find_matches(RULES["ghz_special"], shapes.loop_map(GHZ))) == 1
    assert find_matches(RULES["ghz_special"], shapes.wire()) == []


def test_commutativity_has_two_matches():
    assert len(find_matches(RULES["comm_w"], shapes.mult(W))) == 2


def test_decorations_must_agree():
    host = compose_seq(shapes.comult(GHZ), shapes.mult(GHZ))
    decorated = DiagramBuilder(1, 1)
    a, b = decorated.ghz(), decorated.ghz()
    decorated.wire(("in", 0), a).wire(a, b, tick=1).wire(a, b).wire(b, ("out", 0))
    assert find_matches(RULES["ghz_special"], host)
    assert not find_matches(RULES["ghz_special"], decorated.build())


def test_apply_loop_map_gives_identity():
    out = apply_match(RULES["ghz_special"], shapes.loop_map(GHZ), find_matches(RULES["ghz_special"], shapes.loop_map(GHZ))[0])
    assert is_isomorphic(out, shapes.wire())


def test_matches_are_deterministic_and_unique():
    host = shapes.seq_all(shapes.comult(W), shapes.mult(W), shapes.comult(W), shapes.mult(W))
    for rule in RULES:
        ms = find_matches(rule, host)
        keys = [(m.vertex_map, m.boundary_map) for m in ms]
        assert len(keys) == len(set(keys))
        assert [m.fingerprint for m in ms] == [m.fingerprint for m in find_matches(rule, host)]


def test_bogus_match_rejected():
    rule = RULES["ghz_special"]
    m = find_matches(rule, shapes.loop_map(GHZ))[0]
    bad = Match(tuple((k, v + 100) for k, v in m.vertex_map), m.edge_map, m.boundary_map)
    with pytest.raises(InvalidMatch):
        apply_match(rule, shapes.loop_map(GHZ), bad)


def test_normalize_simplify_loop_map():
    out, trace = normalize(shapes.loop_map(GHZ), "simplify")
    assert is_isomorphic(out, shapes.wire())
    assert [s.rule for s in trace.steps] == ["ghz_special"]


def test_normalize_arith_adds_naturals():
    out, trace = normalize(add(encode_nat(2), encode_nat(3)), "arith")
    assert is_isomorphic(out, encode_nat(5))
    assert not trace.step_limit_exceeded


def test_normalize_step_limit():
    out, trace = normalize(add(encode_nat(2), encode_nat(3)), "arith", max_steps=0)
    assert len(trace) == 0 and trace.step_limit_exceeded


def test_replay_reproduces_result():
    start = add(add(encode_nat(1), encode_nat(2)), encode_nat(1))
    out, trace = normalize(start, "arith")
    assert is_isomorphic(replay(start, trace, "arith"), out)


def test_unknown_strategy():
    with pytest.raises(KeyError):
        strategy("nope")


def test_vertexless_lhs_never_matches():
    rule = RewriteRule("wire_rule", shapes.wire(tick=1), shapes.wire(tick=1))
    assert find_matches(rule, shapes.wire(tick=1)) == []


def test_dpo_preserves_semantics_on_embeddings():
    rng = random.Random(3)
    rules = list(RULES)
    done = 0
    while done < 40:
        rule = rng.choice(rules)
        if rule.params:
            continue
        host = embed(rng, rule.lhs)
        ms = find_matches(rule, host)
        t = evaluate(host)
        if not ms or t.is_zero():
            continue
        out = apply_match(rule, host, rng.choice(ms))
        assert not validate(out)
        assert proj_equal(t, evaluate(out))[0]
        done += 1
