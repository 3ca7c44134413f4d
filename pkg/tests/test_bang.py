import itertools

import pytest

from ghzw import GHZ, W, evaluate, is_isomorphic, proj_equal
from ghzw.arith import encode_nat
from ghzw.bang import (
    BangBox,
    PatternGraph,
    builtin_pattern_rules,
    copy_box,
    count_vectors,
    drop_box,
    enumerate_pattern,
    expand_rule,
    fusion_rule_names,
    instantiate,
    kill_box,
    merge_boxes,
    nat_pattern,
    pattern_rule,
)
from ghzw.diagram import DiagramBuilder
from ghzw.errors import MissingCount, NoSuchBox
from ghzw.rules import check_rule_soundness


def test_nat_pattern_family():
    for k, d in enumerate(enumerate_pattern(nat_pattern(), 4)):
        assert is_isomorphic(d, encode_nat(k))


def test_copy_adds_leg_and_box():
    p = copy_box(nat_pattern(), "n")
    assert len(p.boxes) == 2
    w = [v for v in p.base.vertices.values() if v.kind == W][0]
    assert w.n_in == 2


def test_kill_compacts_legs():
    d = kill_box(nat_pattern(), "n").base
    (w,) = d.vertices.values()
    assert (w.n_in, w.n_out) == (0, 1)


def test_merge_and_drop():
    p = copy_box(nat_pattern(), "n")
    a, b = p.box_ids
    merged = merge_boxes(p, a, b)
    assert len(merged.boxes) == 1
    assert not drop_box(merged, merged.box_ids[0]).boxes
    with pytest.raises(NoSuchBox):
        merge_boxes(p, a, a)


def test_missing_count():
    with pytest.raises(MissingCount):
        instantiate(nat_pattern(), {})


def test_fusion_names():
    names = fusion_rule_names()
    assert len(names) == 8
    assert "ghz_fusion" in names and "w_fusion" in names


@pytest.mark.parametrize("pr", builtin_pattern_rules(), ids=lambda pr: pr.name)
def test_pattern_expansions_sound(pr):
    for counts in count_vectors(pr, 3):
        assert check_rule_soundness(expand_rule(pr, counts)).passed, counts


def test_fusion_expansion_shape():
    rule = expand_rule(pattern_rule("ghz_fusion"), {"a": 1, "b": 1})
    assert rule.lhs.signature == rule.rhs.signature
    assert len(rule.rhs.vertices) == 1


def test_boxed_boundary_copies_ports():
    b = DiagramBuilder(1, 1)
    v = b.ghz()
    b.wire(("in", 0), v).wire(v, ("out", 0))
    p = PatternGraph(b.build(), (BangBox("k", frozenset({v}), frozenset({0}), frozenset({0})),))
    d = instantiate(p, {"k": 3})
    assert d.signature == (3, 3)
    assert instantiate(p, {"k": 0}).signature == (0, 0)
