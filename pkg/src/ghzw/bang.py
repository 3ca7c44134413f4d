"""Pattern graphs with !-boxes and pattern rewrite rules.

A !-box marks vertices (and, for boxed legs, boundary ports) that may be
copied any number of times.  The four operations are COPY, MERGE, DROP
and KILL; :func:`instantiate` expands a pattern by a count per box.

When a box is copied, each edge between the box and an outside vertex is
duplicated, so the outside vertex gains a leg; the new leg is appended
after the existing ones.  Boxed boundary ports are duplicated by
appending fresh ports at the end of the boundary, in sorted order, which
keeps the two sides of a pattern rule aligned.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Optional, Sequence

from .diagram import (
    BOUNDARY_IN,
    BOUNDARY_OUT,
    GHZ,
    W,
    Diagram,
    DiagramBuilder,
    Edge,
    Port,
    Vertex,
    VertexKind,
    input_port,
    output_port,
    validate,
)
from .errors import InvalidDiagram, MissingCount, NoSuchBox, PatternError
from .rules import RewriteRule


@dataclass(frozen=True)
class BangBox:
    id: str
    vertices: frozenset = frozenset()
    inputs: frozenset = frozenset()
    outputs: frozenset = frozenset()

    def holds(self, p: Port) -> bool:
        if p.owner == BOUNDARY_IN:
            return p.index in self.inputs
        if p.owner == BOUNDARY_OUT:
            return p.index in self.outputs
        return p.owner in self.vertices

    @property
    def is_empty(self) -> bool:
        return not (self.vertices or self.inputs or self.outputs)


@dataclass(frozen=True)
class PatternGraph:
    base: Diagram
    boxes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "boxes", tuple(sorted(self.boxes, key=lambda b: b.id)))
        ids = [b.id for b in self.boxes]
        if len(set(ids)) != len(ids):
            raise PatternError(f"duplicate box ids {ids}")
        seen: set = set()
        for b in self.boxes:
            keys = {("v", v) for v in b.vertices} | {("i", i) for i in b.inputs} | {("o", o) for o in b.outputs}
            if keys & seen:
                raise PatternError(f"box {b.id} overlaps another box")
            seen |= keys
            if not b.vertices <= set(self.base.vertices):
                raise PatternError(f"box {b.id} names missing vertices")
            if any(i >= self.base.n_inputs for i in b.inputs) or any(o >= self.base.n_outputs for o in b.outputs):
                raise PatternError(f"box {b.id} names missing boundary ports")

    def box(self, box_id: str) -> BangBox:
        for b in self.boxes:
            if b.id == box_id:
                return b
        raise NoSuchBox(f"no !-box {box_id!r}")

    @property
    def box_ids(self) -> list[str]:
        return [b.id for b in self.boxes]

    def _replace(self, base: Diagram, boxes) -> "PatternGraph":
        return PatternGraph(base, tuple(boxes))


def _fresh_box_id(p: PatternGraph, stem: str) -> str:
    taken = set(p.box_ids)
    for n in itertools.count(1):
        cand = f"{stem}#{n}"
        if cand not in taken:
            return cand


def copy_box(p: PatternGraph, box_id: str) -> PatternGraph:
    """COPY: duplicate the box contents and every edge touching them."""
    box = p.box(box_id)
    d = p.base
    offset = d.next_vertex_id()
    vmap = {v: offset + k for k, v in enumerate(sorted(box.vertices))}
    imap = {i: d.n_inputs + k for k, i in enumerate(sorted(box.inputs))}
    omap = {o: d.n_outputs + k for k, o in enumerate(sorted(box.outputs))}
    n_in = {vid: v.n_in for vid, v in d.vertices.items()}
    n_out = {vid: v.n_out for vid, v in d.vertices.items()}

    def image(port: Port) -> Port:
        if port.owner == BOUNDARY_IN:
            return input_port(imap[port.index])
        if port.owner == BOUNDARY_OUT:
            return output_port(omap[port.index])
        return Port(vmap[port.owner], port.index, port.producer)

    def new_leg(port: Port) -> Port:
        if port.is_boundary:
            raise PatternError(f"box {box_id} is wired to the unboxed boundary port {port}")
        v = port.owner
        if port.producer:
            k = n_out[v]
            n_out[v] += 1
        else:
            k = n_in[v]
            n_in[v] += 1
        return Port(v, k, port.producer)

    new_edges = []
    for e in sorted(d.edges.values(), key=lambda e: e.id):
        s_in, t_in = box.holds(e.src), box.holds(e.dst)
        if not (s_in or t_in):
            continue
        src = image(e.src) if s_in else new_leg(e.src)
        dst = image(e.dst) if t_in else new_leg(e.dst)
        new_edges.append((src, dst, e.tick, e.cross))

    vertices = [Vertex(vid, v.kind, n_in[vid], n_out[vid]) for vid, v in d.vertices.items()]
    vertices += [Vertex(vmap[v], d.vertices[v].kind, d.vertices[v].n_in, d.vertices[v].n_out) for v in sorted(box.vertices)]
    next_id = d.next_edge_id()
    edges = list(d.edges.values())
    edges += [Edge(next_id + k, *spec) for k, spec in enumerate(new_edges)]
    base = Diagram(vertices, edges, d.n_inputs + len(imap), d.n_outputs + len(omap))
    dup = BangBox(
        _fresh_box_id(p, box_id),
        frozenset(vmap.values()),
        frozenset(imap.values()),
        frozenset(omap.values()),
    )
    return p._replace(base, list(p.boxes) + [dup])


def merge_boxes(p: PatternGraph, a: str, b: str) -> PatternGraph:
    """MERGE: one box holding the contents of both."""
    if a == b:
        raise NoSuchBox(f"cannot merge box {a!r} with itself")
    ba, bb = p.box(a), p.box(b)
    merged = BangBox(a, ba.vertices | bb.vertices, ba.inputs | bb.inputs, ba.outputs | bb.outputs)
    return p._replace(p.base, [x for x in p.boxes if x.id not in (a, b)] + [merged])


def drop_box(p: PatternGraph, box_id: str) -> PatternGraph:
    """DROP: forget the box, keeping its contents."""
    p.box(box_id)
    return p._replace(p.base, [x for x in p.boxes if x.id != box_id])


def kill_box(p: PatternGraph, box_id: str) -> PatternGraph:
    """KILL: delete the box, its contents and every edge touching them."""
    box = p.box(box_id)
    d = p.base
    dead = [e for e in d.edges.values() if box.holds(e.src) or box.holds(e.dst)]
    freed = set()
    for e in dead:
        for port in (e.src, e.dst):
            if not box.holds(port):
                if port.is_boundary:
                    raise PatternError(f"box {box_id} is wired to the unboxed boundary port {port}")
                freed.add(port)

    # compact the remaining legs of every surviving vertex
    renum: dict[Port, Port] = {}
    vertices = []
    for vid in sorted(d.vertices):
        if vid in box.vertices:
            continue
        v = d.vertices[vid]
        ins = [k for k in range(v.n_in) if Port(vid, k, False) not in freed]
        outs = [k for k in range(v.n_out) if Port(vid, k, True) not in freed]
        for new, old in enumerate(ins):
            renum[Port(vid, old, False)] = Port(vid, new, False)
        for new, old in enumerate(outs):
            renum[Port(vid, old, True)] = Port(vid, new, True)
        vertices.append(Vertex(vid, v.kind, len(ins), len(outs)))
    keep_in = [i for i in range(d.n_inputs) if i not in box.inputs]
    keep_out = [o for o in range(d.n_outputs) if o not in box.outputs]
    imap = {old: new for new, old in enumerate(keep_in)}
    omap = {old: new for new, old in enumerate(keep_out)}
    for old, new in imap.items():
        renum[input_port(old)] = input_port(new)
    for old, new in omap.items():
        renum[output_port(old)] = output_port(new)

    dead_ids = {e.id for e in dead}
    edges = [
        Edge(e.id, renum[e.src], renum[e.dst], e.tick, e.cross)
        for e in d.edges.values()
        if e.id not in dead_ids
    ]
    base = Diagram(vertices, edges, len(keep_in), len(keep_out))
    boxes = [
        BangBox(
            x.id,
            x.vertices,
            frozenset(imap[i] for i in x.inputs),
            frozenset(omap[o] for o in x.outputs),
        )
        for x in p.boxes
        if x.id != box_id
    ]
    return p._replace(base, boxes)


def instantiate(p: PatternGraph, counts: Mapping[str, int], order: Optional[Sequence[str]] = None) -> Diagram:
    """Expand every box ``k`` times: COPY k-1 times then DROP all, or KILL when k = 0."""
    order = list(order) if order is not None else p.box_ids
    for bid in p.box_ids:
        if bid not in counts:
            raise MissingCount(f"no count for box {bid!r}")
    for bid in order:
        k = counts[bid]
        if k < 0:
            raise PatternError(f"negative count for box {bid!r}")
        if k == 0:
            p = kill_box(p, bid)
            continue
        copies = []
        for _ in range(k - 1):
            before = set(p.box_ids)
            p = copy_box(p, bid)
            copies.extend(set(p.box_ids) - before)
        for cid in [bid] + copies:
            p = drop_box(p, cid)
    if p.boxes:
        raise PatternError(f"boxes left after instantiation: {p.box_ids}")
    problems = validate(p.base)
    if problems:
        raise InvalidDiagram(problems)
    return p.base


# ---------------------------------------------------------------- pattern rules


@dataclass(frozen=True)
class PatternRule:
    name: str
    lhs: PatternGraph
    rhs: PatternGraph
    pairing: tuple  # ((lhs box id, rhs box id), ...)
    provenance: str = ""
    scalar_exact: bool = True

    def __post_init__(self):
        if self.lhs.base.signature != self.rhs.base.signature:
            raise PatternError(f"{self.name}: boundary signatures differ")
        pairs = dict(self.pairing)
        if sorted(pairs) != sorted(self.lhs.box_ids) or sorted(pairs.values()) != sorted(self.rhs.box_ids):
            raise PatternError(f"{self.name}: box pairing is not a bijection")
        for a, b in pairs.items():
            la, rb = self.lhs.box(a), self.rhs.box(b)
            if (la.inputs, la.outputs) != (rb.inputs, rb.outputs):
                raise PatternError(f"{self.name}: paired boxes {a}/{b} hold different boundary ports")

    @property
    def box_ids(self) -> list[str]:
        return self.lhs.box_ids


def expand_rule(pr: PatternRule, counts: Mapping[str, int]) -> RewriteRule:
    """The concrete rule obtained by expanding paired boxes by the same counts."""
    pairs = dict(pr.pairing)
    for bid in pr.box_ids:
        if bid not in counts:
            raise MissingCount(f"no count for box {bid!r}")
    order = pr.box_ids
    lhs = instantiate(pr.lhs, counts, order)
    rhs = instantiate(pr.rhs, {pairs[b]: counts[b] for b in order}, [pairs[b] for b in order])
    tag = ",".join(f"{b}={counts[b]}" for b in order)
    return RewriteRule(f"{pr.name}[{tag}]", lhs, rhs, pr.provenance, pr.scalar_exact)


def count_vectors(pr: PatternRule, max_count: int = 4):
    return [dict(zip(pr.box_ids, ks)) for ks in itertools.product(range(max_count + 1), repeat=len(pr.box_ids))]


# ---------------------------------------------------------------- shipped patterns


def nat_pattern() -> PatternGraph:
    """A boxed white unit feeding a black spider: the natural numbers."""
    b = DiagramBuilder(0, 1)
    u, m = b.ghz(), b.w()
    b.wire(u, m).wire(m, ("out", 0))
    return PatternGraph(b.build(), (BangBox("n", frozenset({u})),))


def enumerate_pattern(p: PatternGraph, max_count: int) -> list[Diagram]:
    return [instantiate(p, dict(zip(p.box_ids, ks))) for ks in itertools.product(range(max_count + 1), repeat=len(p.boxes))]


def _delta1_nat() -> PatternRule:
    b = DiagramBuilder(2, 1)
    add, mul, nat, u = b.w(), b.ghz(), b.w(), b.ghz()
    b.wire(("in", 0), add).wire(("in", 1), add).wire(add, mul).wire(u, nat).wire(nat, mul).wire(mul, ("out", 0))
    lhs = PatternGraph(b.build(), (BangBox("n", frozenset({u})),))
    b = DiagramBuilder(2, 1)
    m1, m2, n1, n2, u1, u2, add = b.ghz(), b.ghz(), b.w(), b.w(), b.ghz(), b.ghz(), b.w()
    b.wire(("in", 0), m1).wire(u1, n1).wire(n1, m1)
    b.wire(("in", 1), m2).wire(u2, n2).wire(n2, m2)
    b.wire(m1, add).wire(m2, add).wire(add, ("out", 0))
    rhs = PatternGraph(b.build(), (BangBox("n", frozenset({u1, u2})),))
    return PatternRule("delta1_nat", lhs, rhs, (("n", "n"),), "multiplication by a natural distributes over addition")


def _delta2_nat() -> PatternRule:
    b = DiagramBuilder(0, 1)
    zero, mul, nat, u = b.w(), b.ghz(), b.w(), b.ghz()
    b.wire(zero, mul).wire(u, nat).wire(nat, mul).wire(mul, ("out", 0))
    lhs = PatternGraph(b.build(), (BangBox("n", frozenset({u})),))
    b = DiagramBuilder(0, 1)
    zero = b.w()
    b.wire(zero, ("out", 0))
    rhs = PatternGraph(b.build(), (BangBox("n"),))
    return PatternRule("delta2_nat", lhs, rhs, (("n", "n"),), "zero times a natural is zero")


def _delta3_nat() -> PatternRule:
    b = DiagramBuilder(1, 1)
    top, bot = b.ghz(), b.ghz()
    num, den = b.w(), b.w()
    one_a, one_b = b.ghz(), b.ghz()
    box_a, box_b = b.ghz(), b.ghz()
    b.wire(("in", 0), top).wire(one_a, num).wire(box_a, num).wire(num, top)
    b.wire(top, bot).wire(one_b, den).wire(box_b, den).wire(den, bot, tick=1).wire(bot, ("out", 0))
    lhs = PatternGraph(b.build(), (BangBox("n", frozenset({box_a, box_b})),))
    rhs = PatternGraph(_wire_diagram(), (BangBox("n"),))
    # the unboxed white units make the natural at least one
    return PatternRule("delta3_nat", lhs, rhs, (("n", "n"),), "a nonzero natural times its inverse is one", scalar_exact=False)


def _wire_diagram() -> Diagram:
    b = DiagramBuilder(1, 1)
    b.wire(("in", 0), ("out", 0))
    return b.build()


FUSION_SIDES = (("in", "in"), ("out", "out"), ("in", "out"), ("out", "in"))


def _fusion(kind: VertexKind, side_a: str, side_b: str) -> PatternRule:
    """Two spiders of one colour joined by a plain wire fuse into one.

    Spider A has a fixed input and its output goes to B; B has a fixed
    output.  Box ``a`` holds extra legs of A on ``side_a`` and box ``b``
    extra legs of B on ``side_b``; each box starts with one leg.
    """
    n_in = 1 + (side_a == "in") + (side_b == "in")
    n_out = 1 + (side_a == "out") + (side_b == "out")
    slots = {}
    nxt = {"in": 1, "out": 1}
    for name, side in (("a", side_a), ("b", side_b)):
        slots[name] = (side, nxt[side])
        nxt[side] += 1

    def boxes():
        out = []
        for name in ("a", "b"):
            side, idx = slots[name]
            out.append(BangBox(name, frozenset(), frozenset({idx}) if side == "in" else frozenset(), frozenset({idx}) if side == "out" else frozenset()))
        return tuple(out)

    def leg(bld, v, name):
        side, idx = slots[name]
        if side == "in":
            bld.wire(("in", idx), v)
        else:
            bld.wire(v, ("out", idx))

    b = DiagramBuilder(n_in, n_out)
    va, vb = b.vertex(kind), b.vertex(kind)
    b.wire(("in", 0), va).wire(va, vb).wire(vb, ("out", 0))
    leg(b, va, "a")
    leg(b, vb, "b")
    lhs = PatternGraph(b.build(), boxes())
    b = DiagramBuilder(n_in, n_out)
    s = b.vertex(kind)
    b.wire(("in", 0), s).wire(s, ("out", 0))
    leg(b, s, "a")
    leg(b, s, "b")
    rhs = PatternGraph(b.build(), boxes())
    tag = "ghz" if kind == GHZ else "w"
    name = f"{tag}_fusion" if (side_a, side_b) == ("in", "in") else f"{tag}_fusion_{side_a}_{side_b}"
    return PatternRule(name, lhs, rhs, (("a", "a"), ("b", "b")), "spider fusion")


def fusion_rule_names() -> list[str]:
    return [r.name for r in builtin_pattern_rules() if "fusion" in r.name]


@lru_cache(maxsize=1)
def _pattern_rules() -> tuple:
    rules = [_delta1_nat(), _delta2_nat(), _delta3_nat()]
    for kind in (GHZ, W):
        for sa, sb in FUSION_SIDES:
            rules.append(_fusion(kind, sa, sb))
    return tuple(rules)


def builtin_pattern_rules() -> list[PatternRule]:
    return list(_pattern_rules())


def pattern_rule(name: str) -> PatternRule:
    for r in _pattern_rules():
        if r.name == name:
            return r
    raise KeyError(f"no pattern rule {name!r}")


@lru_cache(maxsize=None)
def expansions_upto(name: str, max_count: int = 4) -> tuple:
    """Concrete instances of a shipped pattern rule for counts 0..max_count, smallest first."""
    pr = pattern_rule(name)
    vecs = count_vectors(pr, max_count)
    vecs.sort(key=lambda c: (sum(c.values()), sorted(c.items())))
    return tuple(expand_rule(pr, c) for c in vecs)
