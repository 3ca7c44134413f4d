from fractions import Fraction

import pytest

from ghzw import GHZ, W, evaluate, proj_equal, shapes
from ghzw.diagram import compose_seq, empty_diagram
from ghzw.errors import BadWireIndex, ShapeMismatch
from ghzw.rules import (
    RewriteRule,
    builtin_rules,
    check_rule_soundness,
    pendant_scalars,
    sample_environments,
    theorem_delta,
    verify_by_plugging,
)


def test_builtin_rule_names_unique_and_present():
    rs = builtin_rules()
    names = rs.names
    assert len(names) == len(set(names))
    for n in ("alpha", "beta", "gamma", "xi", "beta_prime", "ghz_special", "w_antispecial", "add_inverse"):
        assert n in rs


@pytest.mark.parametrize("name", builtin_rules().names)
def test_each_builtin_rule_sound(name):
    rule = builtin_rules()[name]
    assert check_rule_soundness(rule).passed


def test_reversed_rule_still_sound():
    rule = builtin_rules()["frobenius_w"].reversed()
    assert check_rule_soundness(rule).passed


def test_unsound_rule_reports_counterexample():
    bogus = RewriteRule("bogus", shapes.mult(GHZ), shapes.mult(W))
    rep = check_rule_soundness(bogus)
    assert not rep.passed
    assert rep.counterexample is not None


def test_scalar_exact_flag_checks_lambda():
    # the black circle is the scalar 2, the empty diagram is 1
    loose = RewriteRule("circle", shapes.circle(), empty_diagram(), scalar_exact=False)
    assert check_rule_soundness(loose).passed
    strict = RewriteRule("circle", shapes.circle(), empty_diagram(), scalar_exact=True)
    assert not check_rule_soundness(strict).passed


def test_sample_environments_shape():
    envs = sample_environments(["a", "b"], n_random=3, seed=1)
    assert len(envs) == 8
    assert envs[2] == {"a": (2, 1), "b": (2, 1)}
    assert envs == sample_environments(["b", "a"], n_random=3, seed=1)


@pytest.mark.parametrize("which", [1, 2, 3])
def test_theorems_exact(which):
    rule = theorem_delta(which)
    rep = check_rule_soundness(rule)
    assert rep.passed
    assert all(e.lam == 1 for e in rep.entries)


def test_theorem_scalar_free_is_projective_when_pendants_nonzero():
    for which in (1, 2, 3):
        rule = theorem_delta(which, exact=False)
        for env in sample_environments(["psi"]):
            pend = [evaluate(s, env).entries[0] for s in pendant_scalars()[which]]
            if all(pend):
                assert proj_equal(evaluate(rule.lhs, env), evaluate(rule.rhs, env))[0]


def test_plugging_verifies_delta1():
    rule = theorem_delta(1, exact=False)
    env = {"psi": (Fraction(2), Fraction(1))}
    for wire in (0, 1):
        assert verify_by_plugging(rule.lhs, rule.rhs, wire, "black", env)


def test_plugging_rejects_unequal_pair():
    assert not verify_by_plugging(shapes.mult(GHZ), shapes.mult(W), 0, "black")


def test_plugging_needs_common_scalar():
    # scaling by different values on |1> and X|1> is not a single map equality
    lhs = shapes.wire()
    rhs = compose_seq(shapes.wire(), shapes.wire(cross=1))
    assert not verify_by_plugging(lhs, rhs, 0, "black")


def test_plugging_errors():
    with pytest.raises(BadWireIndex):
        verify_by_plugging(shapes.mult(W), shapes.mult(W), 2)
    with pytest.raises(ShapeMismatch):
        verify_by_plugging(shapes.mult(W), shapes.wire(), 0)
