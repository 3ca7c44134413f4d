"""Concrete rewrite rules and the semantic soundness oracle.

Every rule in :func:`builtin_rules` is checked against the qubit model
when the rule set is first built; an unsound transcription raises
:class:`UnsoundRule` instead of being shipped.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence

from . import shapes
from .diagram import GHZ, W, Diagram, DiagramBuilder, VertexKind, compose_par, compose_seq
from .errors import BadWireIndex, ShapeMismatch, UnsoundRule
from .semantics import Environment, evaluate, proj_equal


@dataclass(frozen=True)
class RewriteRule:
    name: str
    lhs: Diagram
    rhs: Diagram
    provenance: str = ""
    scalar_exact: bool = True

    def __post_init__(self):
        if self.lhs.signature != self.rhs.signature:
            raise ShapeMismatch(
                f"rule {self.name}: lhs {self.lhs.signature} vs rhs {self.rhs.signature}"
            )

    @property
    def params(self) -> set[str]:
        return param_names(self.lhs) | param_names(self.rhs)

    def reversed(self) -> "RewriteRule":
        return RewriteRule(self.name + "_rev", self.rhs, self.lhs, self.provenance, self.scalar_exact)


class RuleSet:
    """Ordered collection of rules with unique names."""

    def __init__(self, rules: Iterable[RewriteRule] = ()):
        self._rules = tuple(rules)
        names = [r.name for r in self._rules]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise ValueError(f"duplicate rule names: {dupes}")
        self._by_name = {r.name: r for r in self._rules}

    def __iter__(self) -> Iterator[RewriteRule]:
        return iter(self._rules)

    def __len__(self):
        return len(self._rules)

    def __contains__(self, name):
        return name in self._by_name

    def __getitem__(self, name: str) -> RewriteRule:
        return self._by_name[name]

    @property
    def names(self) -> list[str]:
        return [r.name for r in self._rules]

    def __add__(self, other: "RuleSet") -> "RuleSet":
        return RuleSet(list(self) + list(other))


def param_names(d: Diagram) -> set[str]:
    return {v.kind.name for v in d.vertices.values() if v.kind.tag == "param"}


# ---------------------------------------------------------------- soundness


@dataclass
class SoundnessEntry:
    env: dict
    equal: bool
    lam: Optional[Fraction]


@dataclass
class SoundnessReport:
    rule: str
    entries: list[SoundnessEntry] = field(default_factory=list)
    scalar_exact: bool = True

    @property
    def passed(self) -> bool:
        return all(self._ok(e) for e in self.entries)

    def _ok(self, e: SoundnessEntry) -> bool:
        return e.equal and (not self.scalar_exact or e.lam == 1)

    @property
    def counterexample(self) -> Optional[SoundnessEntry]:
        return next((e for e in self.entries if not self._ok(e)), None)

    def __bool__(self):
        return self.passed


def random_vector(rng: random.Random) -> tuple[Fraction, Fraction]:
    """Nonzero vector with entries in {-3..3}/{1..3}."""
    while True:
        v = tuple(Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(2))
        if any(v):
            return v


def sample_environments(names: Iterable[str], n_random: int = 20, seed: int = 0) -> list[dict]:
    """The encodings 0..4 of every parameter, then ``n_random`` random environments."""
    names = sorted(names)
    if not names:
        return [{}]
    envs = [{name: (Fraction(k), Fraction(1)) for name in names} for k in range(5)]
    rng = random.Random(seed)
    for _ in range(n_random):
        envs.append({name: random_vector(rng) for name in names})
    return envs


def check_rule_soundness(rule: RewriteRule, env_samples: Optional[Sequence[Environment]] = None) -> SoundnessReport:
    if env_samples is None:
        env_samples = sample_environments(rule.params)
    report = SoundnessReport(rule.name, scalar_exact=rule.scalar_exact)
    for env in env_samples:
        ok, lam = proj_equal(evaluate(rule.lhs, env), evaluate(rule.rhs, env))
        report.entries.append(SoundnessEntry(dict(env), ok, lam))
    return report


def plugging_set(colour: str) -> list[Diagram]:
    if colour == "black":
        return [shapes.unit(W), compose_seq(shapes.unit(W), shapes.wire(tick=1))]
    if colour == "white":
        return [shapes.unit(GHZ), compose_seq(shapes.unit(GHZ), shapes.wire(cross=1))]
    raise ValueError(f"colour must be 'black' or 'white', got {colour!r}")


def verify_by_plugging(
    lhs: Diagram,
    rhs: Diagram,
    wire: int,
    colour: str = "black",
    env: Optional[Environment] = None,
) -> bool:
    """Plug each point of the colour's plugging set into input ``wire``.

    The two sides must agree up to one scalar shared by every plugging;
    a separate scalar per plugging would not imply equality of the maps.
    """
    if lhs.signature != rhs.signature:
        raise ShapeMismatch(f"signatures {lhs.signature} and {rhs.signature} differ")
    if not 0 <= wire < lhs.n_inputs:
        raise BadWireIndex(f"wire {wire} out of range for {lhs.n_inputs} inputs")
    common = None
    for pt in plugging_set(colour):
        t1 = evaluate(shapes.plug(lhs, pt, wire), env)
        t2 = evaluate(shapes.plug(rhs, pt, wire), env)
        ok, lam = proj_equal(t1, t2)
        if not ok:
            return False
        if t1.is_zero():
            continue
        if common is None:
            common = lam
        elif lam != common:
            return False
    return True


# ---------------------------------------------------------------- rule shapes


def _assoc(kind: VertexKind) -> tuple[Diagram, Diagram]:
    b = DiagramBuilder(3, 1)
    m1, m2 = b.vertex(kind), b.vertex(kind)
    b.wire(("in", 0), m1).wire(("in", 1), m1).wire(m1, m2).wire(("in", 2), m2).wire(m2, ("out", 0))
    lhs = b.build()
    b = DiagramBuilder(3, 1)
    m1, m2 = b.vertex(kind), b.vertex(kind)
    b.wire(("in", 1), m1).wire(("in", 2), m1).wire(("in", 0), m2).wire(m1, m2).wire(m2, ("out", 0))
    return lhs, b.build()


def _coassoc(kind: VertexKind) -> tuple[Diagram, Diagram]:
    b = DiagramBuilder(1, 3)
    d1, d2 = b.vertex(kind), b.vertex(kind)
    b.wire(("in", 0), d1).wire(d1, d2).wire(d1, ("out", 2)).wire(d2, ("out", 0)).wire(d2, ("out", 1))
    lhs = b.build()
    b = DiagramBuilder(1, 3)
    d1, d2 = b.vertex(kind), b.vertex(kind)
    b.wire(("in", 0), d1).wire(d1, ("out", 0)).wire(d1, d2).wire(d2, ("out", 1)).wire(d2, ("out", 2))
    return lhs, b.build()


def _comm(kind: VertexKind) -> tuple[Diagram, Diagram]:
    b = DiagramBuilder(2, 1)
    m = b.vertex(kind)
    b.wire(("in", 1), m).wire(("in", 0), m).wire(m, ("out", 0))
    return shapes.mult(kind), b.build()


def _cocomm(kind: VertexKind) -> tuple[Diagram, Diagram]:
    b = DiagramBuilder(1, 2)
    d = b.vertex(kind)
    b.wire(("in", 0), d).wire(d, ("out", 1)).wire(d, ("out", 0))
    return shapes.comult(kind), b.build()


def _unit(kind: VertexKind) -> tuple[Diagram, Diagram]:
    b = DiagramBuilder(1, 1)
    u, m = b.vertex(kind), b.vertex(kind)
    b.wire(u, m).wire(("in", 0), m).wire(m, ("out", 0))
    return b.build(), shapes.wire()


def _counit(kind: VertexKind) -> tuple[Diagram, Diagram]:
    b = DiagramBuilder(1, 1)
    d, c = b.vertex(kind), b.vertex(kind)
    b.wire(("in", 0), d).wire(d, c).wire(d, ("out", 0))
    return b.build(), shapes.wire()


def _frobenius(kind: VertexKind) -> tuple[Diagram, Diagram]:
    b = DiagramBuilder(2, 2)
    d, m = b.vertex(kind), b.vertex(kind)
    b.wire(("in", 0), d).wire(d, ("out", 0)).wire(d, m).wire(("in", 1), m).wire(m, ("out", 1))
    lhs = b.build()
    return lhs, compose_seq(shapes.mult(kind), shapes.comult(kind))


def _w_antispecial() -> tuple[Diagram, Diagram]:
    lhs = compose_par(shapes.circle(W), shapes.loop_map(W))
    rhs = compose_par(shapes.co_lollipop(), shapes.lollipop())
    return lhs, rhs


def _beta(tick: int) -> tuple[Diagram, Diagram]:
    b = DiagramBuilder(0, 2)
    u, d = b.w(), b.ghz()
    b.wire(u, d, tick=tick).wire(d, ("out", 0)).wire(d, ("out", 1))
    lhs = b.build()
    ticked_unit = compose_seq(shapes.unit(W), shapes.wire(tick=tick))
    return lhs, compose_par(ticked_unit, ticked_unit)


def _gamma() -> tuple[Diagram, Diagram]:
    lhs = compose_seq(shapes.wire(tick=1), shapes.comult(GHZ))
    rhs = compose_seq(shapes.comult(GHZ), compose_par(shapes.wire(tick=1), shapes.wire(tick=1)))
    return lhs, rhs


def _xi() -> tuple[Diagram, Diagram]:
    lhs = compose_par(shapes.circle(W), compose_seq(shapes.unit(W), shapes.wire(tick=1)))
    return lhs, shapes.lollipop()


def _cross_slide() -> tuple[Diagram, Diagram]:
    lhs = compose_seq(shapes.mult(GHZ), shapes.wire(cross=1))
    rhs = compose_seq(compose_par(shapes.wire(cross=1), shapes.wire()), shapes.mult(GHZ))
    return lhs, rhs


def _cross_black_homom() -> tuple[Diagram, Diagram]:
    lhs = compose_seq(shapes.mult(W), shapes.wire(cross=1))
    rhs = compose_seq(compose_par(shapes.wire(cross=1), shapes.wire(cross=1)), shapes.mult(W))
    return lhs, rhs


def _add_inverse(name: str = "psi") -> tuple[Diagram, Diagram]:
    b = DiagramBuilder(0, 1)
    p, q, m = b.param(name), b.param(name), b.w()
    b.wire(p, m).wire(q, m, cross=1).wire(m, ("out", 0))
    lhs = b.build()
    b = DiagramBuilder(0, 1)
    p, q, m, c, u = b.param(name), b.param(name), b.w(), b.ghz(), b.w()
    b.wire(p, m).wire(q, m, cross=1).wire(m, c).wire(u, ("out", 0))
    return lhs, b.build()


_CFA = "Frobenius algebra axioms, both colours"
_PAIR = "GHZ/W-pair axioms"
_CROSS = "cross operator, additive inverse"


def _build_rules() -> list[RewriteRule]:
    rules = []
    for kind, tag in ((GHZ, "ghz"), (W, "w")):
        for name, maker in (
            ("assoc", _assoc),
            ("coassoc", _coassoc),
            ("comm", _comm),
            ("cocomm", _cocomm),
            ("unit", _unit),
            ("counit", _counit),
            ("frobenius", _frobenius),
        ):
            lhs, rhs = maker(kind)
            rules.append(RewriteRule(f"{name}_{tag}", lhs, rhs, _CFA))
    rules.append(RewriteRule("ghz_identity", shapes.spider(GHZ, 1, 1), shapes.wire(), "spider normal form"))
    rules.append(RewriteRule("w_identity", shapes.spider(W, 1, 1), shapes.wire(), "spider normal form"))
    rules.append(RewriteRule("ghz_special", shapes.loop_map(GHZ), shapes.wire(), "GHZ special law"))
    rules.append(RewriteRule("w_antispecial", *_w_antispecial(), "W anti-special law"))
    rules.append(
        RewriteRule("alpha", shapes.tick_composite(W, GHZ), shapes.tick_composite(GHZ, W), _PAIR)
    )
    rules.append(
        RewriteRule("tick_def", shapes.tick_composite(W, GHZ), shapes.wire(tick=1), _PAIR)
    )
    rules.append(RewriteRule("beta", *_beta(0), _PAIR))
    rules.append(RewriteRule("gamma", *_gamma(), _PAIR))
    rules.append(RewriteRule("xi", *_xi(), _PAIR))
    rules.append(RewriteRule("beta_prime", *_beta(1), _PAIR))
    # parities already cancel in the representation; kept for the catalogue
    rules.append(RewriteRule("tick_involution", compose_seq(shapes.wire(tick=1), shapes.wire(tick=1)), shapes.wire(), _PAIR))
    rules.append(RewriteRule("cross_involution", compose_seq(shapes.wire(cross=1), shapes.wire(cross=1)), shapes.wire(), _CROSS))
    rules.append(RewriteRule("cross_phase_slide", *_cross_slide(), _CROSS))
    rules.append(RewriteRule("cross_black_homom", *_cross_black_homom(), _CROSS))
    rules.append(
        RewriteRule(
            "cross_kills_black_unit",
            compose_seq(shapes.unit(W), shapes.wire(cross=1)),
            shapes.unit(W),
            _CROSS,
        )
    )
    rules.append(RewriteRule("add_inverse", *_add_inverse(), _CROSS))
    return rules


@lru_cache(maxsize=1)
def builtin_rules() -> RuleSet:
    rs = RuleSet(_build_rules())
    for rule in rs:
        report = check_rule_soundness(rule, sample_environments(rule.params, n_random=4, seed=1))
        if not report:
            raise UnsoundRule(f"{rule.name} fails at {report.counterexample.env}")
    return rs


# ---------------------------------------------------------------- theorems


def _psi_scalars(name: str) -> tuple[Diagram, Diagram]:
    """(psi0, psi1) as closed diagrams: the point into the black counit, plain and ticked."""
    return shapes.pendant(shapes.point(name)), shapes.pendant(shapes.point(name), tick=1)


def theorem_delta(which: int, name: str = "psi", exact: bool = True) -> RewriteRule:
    """Theorems on white phases and black structure.

    1: a phase after black multiplication is two phases before it (pendant psi1);
    2: a phase on the black unit is the black unit (pendant psi1);
    3: a phase followed by its tick-inverse phase is the wire (pendants psi0, psi1).

    With ``exact`` the pendant scalars are included and the equation holds
    on the nose; without them it holds projectively when they are nonzero.
    """
    psi0, psi1 = _psi_scalars(name)
    ph = shapes.phase(name)
    if which == 1:
        lhs = compose_seq(shapes.mult(W), ph)
        rhs = compose_seq(compose_par(ph, ph), shapes.mult(W))
        scal = [psi1]
    elif which == 2:
        lhs = compose_seq(shapes.unit(W), ph)
        rhs = shapes.unit(W)
        scal = [psi1]
    elif which == 3:
        lhs = compose_seq(ph, shapes.phase(name, tick=1))
        rhs = shapes.wire()
        scal = [psi0, psi1]
    else:
        raise ValueError("theorem index must be 1, 2 or 3")
    if exact:
        if which == 1:
            lhs = shapes.tensor_all(*scal, lhs)
        else:
            rhs = shapes.tensor_all(*scal, rhs)
    return RewriteRule(f"delta{which}" + ("" if exact else "_free"), lhs, rhs, "natural-number theorems", exact)


def pendant_scalars(name: str = "psi") -> dict[int, Diagram]:
    """Pendant scalars of the theorems: which -> the scalar diagrams multiplied on."""
    psi0, psi1 = _psi_scalars(name)
    return {1: [psi1], 2: [psi1], 3: [psi0, psi1]}
