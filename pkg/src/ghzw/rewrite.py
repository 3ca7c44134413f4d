"""Matching and double-pushout rewriting of concrete rules.

A match sends every LHS vertex to a host vertex of the same kind and
exact arity, every LHS interior edge to a host edge with identical
decorations, and every LHS boundary edge to the host edge it lands on.
Legs of a spider are interchangeable within a direction, so an LHS edge
may use any free leg of the right direction on its image vertex.

Two LHS boundary edges may land on the same host edge when the host
wires an LHS output straight back into an LHS input (the *crossing*
case); the host decorations must then be the sum of both LHS segments.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

from .diagram import (
    BOUNDARY_IN,
    BOUNDARY_OUT,
    GHZ,
    Diagram,
    Edge,
    Port,
    Vertex,
    in_port,
    out_port,
    validate,
)
from .errors import InvalidDiagram, InvalidMatch
from .rules import RewriteRule, RuleSet


@dataclass(frozen=True)
class Match:
    vertex_map: tuple  # ((lhs vertex, host vertex), ...) sorted by lhs id
    edge_map: tuple  # ((lhs interior edge, host edge), ...)
    boundary_map: tuple  # ((("in"|"out", index), host edge), ...)

    @property
    def image(self) -> tuple[int, ...]:
        return tuple(sorted(h for _, h in self.vertex_map))

    def vertices(self) -> dict[int, int]:
        return dict(self.vertex_map)

    def edges(self) -> dict[int, int]:
        return dict(self.edge_map)

    def boundary(self) -> dict[tuple[str, int], int]:
        return dict(self.boundary_map)

    @property
    def fingerprint(self) -> str:
        vs = ",".join(str(h) for _, h in self.vertex_map)
        bs = " ".join(f"{side[0]}{i}=e{h}" for (side, i), h in self.boundary_map)
        return f"v[{vs}] {bs}".rstrip()

    def _order(self):
        return (self.image, self.vertex_map, self.boundary_map)


# ---------------------------------------------------------------- matching


def _sig(v: Vertex):
    return (v.kind, v.n_in, v.n_out)


def _out_edges(d: Diagram, vid: int) -> list[Edge]:
    return [d.edge_at(out_port(vid, k)) for k in range(d.vertices[vid].n_out)]


def _in_edges(d: Diagram, vid: int) -> list[Edge]:
    return [d.edge_at(in_port(vid, k)) for k in range(d.vertices[vid].n_in)]


def _twin_classes(lhs: Diagram) -> dict[int, int]:
    """Map each interchangeable LHS vertex to its predecessor in its class.

    Vertices are twins when they have the same kind and arity, no boundary
    edges, and identical neighbourhoods; swapping their images gives the
    same rewrite, so only increasing host ids are enumerated.
    """
    keys = {}
    for vid, v in lhs.vertices.items():
        nbhd = []
        boundary = False
        for e in _in_edges(lhs, vid):
            if e.src.is_boundary:
                boundary = True
            nbhd.append(("in", "self" if e.src.owner == vid else e.src.owner, e.decoration))
        for e in _out_edges(lhs, vid):
            if e.dst.is_boundary:
                boundary = True
            nbhd.append(("out", "self" if e.dst.owner == vid else e.dst.owner, e.decoration))
        if not boundary:
            keys[vid] = (_sig(v), tuple(sorted(nbhd, key=repr)))
    classes = defaultdict(list)
    for vid in sorted(keys):
        classes[keys[vid]].append(vid)
    prev = {}
    for members in classes.values():
        for a, b in zip(members, members[1:]):
            prev[b] = a
    return prev


class _Matcher:
    def __init__(self, lhs: Diagram, host: Diagram):
        self.lhs = lhs
        self.host = host
        self.twin_prev = _twin_classes(lhs)
        self.twin_next = {b: a for a, b in self.twin_prev.items()}
        self.by_sig = defaultdict(list)
        for vid in sorted(host.vertices):
            self.by_sig[_sig(host.vertices[vid])].append(vid)
        self.host_nbrs = defaultdict(set)
        self.host_between = defaultdict(list)  # (src v, dst v) -> host edges, by id
        for e in sorted(host.edges.values(), key=lambda e: e.id):
            if not e.src.is_boundary and not e.dst.is_boundary:
                self.host_nbrs[e.src.owner].add(e.dst.owner)
                self.host_nbrs[e.dst.owner].add(e.src.owner)
                self.host_between[(e.src.owner, e.dst.owner)].append(e)
        self.lhs_between = defaultdict(list)
        self.lhs_nbrs = defaultdict(set)
        self.lb_in, self.lb_out = [], []
        for e in sorted(lhs.edges.values(), key=lambda e: e.id):
            if e.src.is_boundary:
                self.lb_in.append(e)
            elif e.dst.is_boundary:
                self.lb_out.append(e)
            else:
                self.lhs_between[(e.src.owner, e.dst.owner)].append(e)
                self.lhs_nbrs[e.src.owner].add(e.dst.owner)
                self.lhs_nbrs[e.dst.owner].add(e.src.owner)
        self.order = self._vertex_order()

    def _vertex_order(self) -> list[int]:
        remaining = set(self.lhs.vertices)
        order = []
        while remaining:
            start = min(remaining, key=lambda v: (len(self.by_sig[_sig(self.lhs.vertices[v])]), v))
            frontier = [start]
            remaining.discard(start)
            while frontier:
                v = frontier.pop(0)
                order.append(v)
                for w in sorted(self.lhs_nbrs[v]):
                    if w in remaining:
                        remaining.discard(w)
                        frontier.append(w)
        return order

    def _pair_ok(self, phi, u, v) -> bool:
        need = Counter(e.decoration for e in self.lhs_between[(u, v)])
        if not need:
            return True
        have = Counter(e.decoration for e in self.host_between[(phi[u], phi[v])])
        return all(have[d] >= k for d, k in need.items())

    def vertex_maps(self) -> Iterator[dict[int, int]]:
        phi: dict[int, int] = {}
        used: set[int] = set()

        def rec(pos):
            if pos == len(self.order):
                yield dict(phi)
                return
            lv = self.order[pos]
            cands = self.by_sig[_sig(self.lhs.vertices[lv])]
            mapped_nbrs = [w for w in self.lhs_nbrs[lv] if w in phi]
            if mapped_nbrs:
                allowed = set.intersection(*(self.host_nbrs[phi[w]] for w in mapped_nbrs))
                cands = [c for c in cands if c in allowed]
            floor = phi.get(self.twin_prev.get(lv), -1)
            ceiling = phi.get(self.twin_next.get(lv), len(self.host.vertices) + max(self.host.vertices, default=0) + 1)
            for hv in cands:
                if hv in used or not floor < hv < ceiling:
                    continue
                phi[lv] = hv
                if all(self._pair_ok(phi, lv, w) and self._pair_ok(phi, w, lv) for w in list(phi)):
                    used.add(hv)
                    yield from rec(pos + 1)
                    used.discard(hv)
                del phi[lv]

        yield from rec(0)

    def edge_assignments(self, phi: dict[int, int]) -> Iterator[tuple[dict, dict]]:
        host = self.host
        image = set(phi.values())
        interior: dict[int, int] = {}
        taken: set[int] = set()
        for (u, v), les in sorted(self.lhs_between.items()):
            pool = [e for e in self.host_between[(phi[u], phi[v])]]
            for le in les:
                he = next((e for e in pool if e.id not in taken and e.decoration == le.decoration), None)
                if he is None:
                    return
                interior[le.id] = he.id
                taken.add(he.id)

        free_in = {lv: [e for e in _in_edges(host, hv) if e.id not in taken] for lv, hv in phi.items()}
        free_out = {lv: [e for e in _out_edges(host, hv) if e.id not in taken] for lv, hv in phi.items()}
        bmap: dict[tuple[str, int], int] = {}
        in_owner: dict[int, Edge] = {}  # host edge -> lhs in-boundary edge using it
        out_used: set[int] = set()

        def xor(a, b):
            return (a[0] ^ b[0], a[1] ^ b[1])

        def rec_in(k):
            if k == len(self.lb_in):
                yield from rec_out(0)
                return
            le = self.lb_in[k]
            for he in free_in[le.dst.owner]:
                if he.id in in_owner:
                    continue
                crossing = not he.src.is_boundary and he.src.owner in image
                if not crossing and he.decoration != le.decoration:
                    continue
                in_owner[he.id] = le
                bmap[(BOUNDARY_IN, le.src.index)] = he.id
                yield from rec_in(k + 1)
                del bmap[(BOUNDARY_IN, le.src.index)]
                del in_owner[he.id]

        def rec_out(k):
            if k == len(self.lb_out):
                if all(h in out_used for h, le in in_owner.items() if _is_crossing(host, h, image)):
                    yield dict(interior), dict(bmap)
                return
            le = self.lb_out[k]
            for he in free_out[le.src.owner]:
                if he.id in out_used:
                    continue
                if not he.dst.is_boundary and he.dst.owner in image:
                    partner = in_owner.get(he.id)
                    if partner is None or xor(partner.decoration, le.decoration) != he.decoration:
                        continue
                elif he.decoration != le.decoration:
                    continue
                out_used.add(he.id)
                bmap[(BOUNDARY_OUT, le.dst.index)] = he.id
                yield from rec_out(k + 1)
                del bmap[(BOUNDARY_OUT, le.dst.index)]
                out_used.discard(he.id)

        yield from rec_in(0)


def _is_crossing(host: Diagram, eid: int, image: set[int]) -> bool:
    e = host.edges[eid]
    return (
        not e.src.is_boundary
        and not e.dst.is_boundary
        and e.src.owner in image
        and e.dst.owner in image
    )


def _matchable(lhs: Diagram) -> bool:
    return bool(lhs.vertices) and not any(e.is_passthrough for e in lhs.edges.values())


def _fits(lhs: Diagram, host: Diagram) -> bool:
    need = Counter(_sig(v) for v in lhs.vertices.values())
    have = Counter(_sig(v) for v in host.vertices.values())
    return all(have[s] >= k for s, k in need.items())


def iter_matches(rule: RewriteRule, host: Diagram) -> Iterator[Match]:
    """Matches in discovery order (unsorted, deduplicated)."""
    lhs = rule.lhs
    if not _matchable(lhs) or not _fits(lhs, host):
        return
    m = _Matcher(lhs, host)
    seen = set()
    for phi in m.vertex_maps():
        for interior, bmap in m.edge_assignments(phi):
            vm = tuple(sorted(phi.items()))
            bm = tuple(sorted(bmap.items()))
            if (vm, bm) in seen:
                continue
            seen.add((vm, bm))
            yield Match(vm, tuple(sorted(interior.items())), bm)


def find_matches(rule: RewriteRule, host: Diagram) -> list[Match]:
    """All matches of ``rule.lhs`` in ``host``, ordered by sorted image vertex ids."""
    return sorted(iter_matches(rule, host), key=Match._order)


# ---------------------------------------------------------------- rewriting


def _check_match(rule: RewriteRule, host: Diagram, m: Match) -> None:
    lhs = rule.lhs
    phi = m.vertices()
    if set(phi) != set(lhs.vertices):
        raise InvalidMatch("vertex map does not cover the LHS")
    if len(set(phi.values())) != len(phi):
        raise InvalidMatch("vertex map is not injective")
    for lv, hv in phi.items():
        hvx = host.vertices.get(hv)
        if hvx is None or _sig(hvx) != _sig(lhs.vertices[lv]):
            raise InvalidMatch(f"host vertex {hv} does not match LHS vertex {lv}")
    image = set(phi.values())
    covered = Counter()
    for le_id, he_id in m.edge_map:
        le, he = lhs.edges.get(le_id), host.edges.get(he_id)
        if le is None or he is None:
            raise InvalidMatch("edge map refers to missing edges")
        if (he.src.owner, he.dst.owner) != (phi[le.src.owner], phi[le.dst.owner]) or he.decoration != le.decoration:
            raise InvalidMatch(f"host edge {he_id} is not the image of LHS edge {le_id}")
        covered[(he_id, "out")] += 1
        covered[(he_id, "in")] += 1
    bmap = m.boundary()
    if set(bmap) != {(BOUNDARY_IN, i) for i in range(lhs.n_inputs)} | {
        (BOUNDARY_OUT, j) for j in range(lhs.n_outputs)
    }:
        raise InvalidMatch("boundary map does not cover the LHS boundary")
    for (side, idx), he_id in bmap.items():
        he = host.edges.get(he_id)
        le = lhs.input_edge(idx) if side == BOUNDARY_IN else lhs.output_edge(idx)
        if he is None:
            raise InvalidMatch(f"host edge {he_id} is missing")
        if side == BOUNDARY_IN:
            if he.dst.is_boundary or he.dst.owner != phi[le.dst.owner]:
                raise InvalidMatch(f"host edge {he_id} does not enter the image of input {idx}")
            covered[(he_id, "in")] += 1
        else:
            if he.src.is_boundary or he.src.owner != phi[le.src.owner]:
                raise InvalidMatch(f"host edge {he_id} does not leave the image of output {idx}")
            covered[(he_id, "out")] += 1
    if any(c > 1 for c in covered.values()):
        raise InvalidMatch("host edge used twice in the same role")
    for hv in image:
        for e in _in_edges(host, hv):
            if covered[(e.id, "in")] != 1:
                raise InvalidMatch(f"gluing condition fails at host edge {e.id}")
        for e in _out_edges(host, hv):
            if covered[(e.id, "out")] != 1:
                raise InvalidMatch(f"gluing condition fails at host edge {e.id}")


def apply_match(rule: RewriteRule, host: Diagram, m: Match) -> Diagram:
    """Delete the image of the LHS and glue in the RHS along the boundary."""
    _check_match(rule, host, m)
    rhs = rule.rhs
    phi = m.vertices()
    image = set(phi.values())
    bmap = m.boundary()

    out_edge_ids = {bmap[(BOUNDARY_OUT, j)]: j for j in range(rule.lhs.n_outputs)}
    producer: dict[int, Port] = {}  # RHS input -> host producer
    consumer: dict[int, Port] = {}  # RHS output -> host consumer
    link: dict[int, int] = {}  # RHS output -> RHS input wired straight back by the host
    for i in range(rule.lhs.n_inputs):
        he = host.edges[bmap[(BOUNDARY_IN, i)]]
        if he.id in out_edge_ids:
            link[out_edge_ids[he.id]] = i
        else:
            producer[i] = he.src
    for j in range(rule.lhs.n_outputs):
        he = host.edges[bmap[(BOUNDARY_OUT, j)]]
        if j not in link:
            consumer[j] = he.dst

    removed = {h for _, h in m.edge_map} | set(bmap.values())
    vertices = [v for v in host.vertices.values() if v.id not in image]
    edges = [e for e in host.edges.values() if e.id not in removed]

    offset = host.next_vertex_id()
    vnew = {rv: offset + k for k, rv in enumerate(sorted(rhs.vertices))}
    for rv, nv in vnew.items():
        v = rhs.vertices[rv]
        vertices.append(Vertex(nv, v.kind, v.n_in, v.n_out))
    next_edge = host.next_edge_id()

    def lift(p: Port) -> Port:
        return Port(vnew[p.owner], p.index, p.producer)

    def follow(e: Edge, tick: int, cross: int, visited: set):
        """Walk RHS edges through host links until reaching a real consumer."""
        while True:
            tick ^= e.tick
            cross ^= e.cross
            if not e.dst.is_boundary:
                return lift(e.dst), tick, cross
            j = e.dst.index
            if j in consumer:
                return consumer[j], tick, cross
            i = link[j]
            if i in visited:
                return None, tick, cross
            visited.add(i)
            e = rhs.input_edge(i)

    new_edges = []
    starts = []
    for rv in sorted(rhs.vertices):
        for k in range(rhs.vertices[rv].n_out):
            starts.append((lift(out_port(rv, k)), rhs.edge_at(out_port(rv, k)), set()))
    for i in sorted(producer):
        starts.append((producer[i], rhs.input_edge(i), {i}))
    visited_inputs = set(producer)
    for src, e, visited in starts:
        dst, t, c = follow(e, 0, 0, visited)
        visited_inputs |= visited
        new_edges.append((src, dst, t, c))

    # host links with no RHS vertex on them close into bare loops
    loop_vid = offset + len(vnew)
    for i in sorted(link.values()):
        if i in visited_inputs:
            continue
        visited = {i}
        _, t, c = follow(rhs.input_edge(i), 0, 0, visited)
        visited_inputs |= visited
        vid = loop_vid
        loop_vid += 1
        vertices.append(Vertex(vid, GHZ, 1, 1))
        new_edges.append((out_port(vid, 0), in_port(vid, 0), t, c))

    for src, dst, t, c in new_edges:
        edges.append(Edge(next_edge, src, dst, t, c))
        next_edge += 1
    result = Diagram(vertices, edges, host.n_inputs, host.n_outputs)
    problems = validate(result)
    if problems:
        raise InvalidMatch(f"rewrite produced an invalid diagram: {InvalidDiagram(problems)}")
    return result


# ---------------------------------------------------------------- strategies


@dataclass(frozen=True)
class TraceStep:
    rule: str
    fingerprint: str
    before: tuple[int, int]
    after: tuple[int, int]

    def __str__(self):
        return f"{self.rule} @ {self.fingerprint}"


@dataclass
class RewriteTrace:
    steps: list[TraceStep] = field(default_factory=list)
    step_limit_exceeded: bool = False

    def __len__(self):
        return len(self.steps)

    def to_text(self) -> str:
        return "".join(f"{s}\n" for s in self.steps)


def _size(d: Diagram) -> tuple[int, int]:
    return (len(d.vertices), len(d.edges))


def first_match(rule: RewriteRule, host: Diagram) -> Optional[Match]:
    ms = find_matches(rule, host)
    return ms[0] if ms else None


def rewrite_step(d: Diagram, rules: Iterable[RewriteRule]) -> Optional[tuple[Diagram, TraceStep]]:
    for rule in rules:
        m = first_match(rule, d)
        if m is not None:
            out = apply_match(rule, d, m)
            return out, TraceStep(rule.name, m.fingerprint, _size(d), _size(out))
    return None


def normalize(
    d: Diagram,
    rules: Union[RuleSet, Iterable[RewriteRule], str],
    max_steps: int = 100,
) -> tuple[Diagram, RewriteTrace]:
    """Apply the first matching rule at its first match until none match."""
    if isinstance(rules, str):
        rules = strategy(rules)
    rules = list(rules)
    trace = RewriteTrace()
    while True:
        if len(trace) >= max_steps:
            trace.step_limit_exceeded = rewrite_step(d, rules) is not None
            return d, trace
        step = rewrite_step(d, rules)
        if step is None:
            return d, trace
        d, info = step
        trace.steps.append(info)


def replay(d: Diagram, trace: RewriteTrace, rules: Union[RuleSet, Iterable[RewriteRule], str]) -> Diagram:
    """Re-run a trace from ``d``, locating each match by its fingerprint."""
    if isinstance(rules, str):
        rules = strategy(rules)
    by_name = {r.name: r for r in rules}
    for step in trace.steps:
        rule = by_name[step.rule]
        m = next((m for m in find_matches(rule, d) if m.fingerprint == step.fingerprint), None)
        if m is None:
            raise InvalidMatch(f"step {step} does not apply")
        d = apply_match(rule, d, m)
    return d


STRATEGIES = ("simplify", "arith")


def strategy(name: str, max_count: int = 4) -> RuleSet:
    """Curated rule lists for :func:`normalize`.

    ``simplify`` removes units, counits, identity spiders and GHZ loops and
    fuses adjacent spiders.  ``arith`` adds the natural-number rules, with
    the graph-growing copy rule last.
    """
    from .bang import expansions_upto, fusion_rule_names
    from .rules import builtin_rules

    base = builtin_rules()
    if name not in STRATEGIES:
        raise KeyError(f"unknown strategy {name!r}; choose from {', '.join(STRATEGIES)}")
    rules = [base[n] for n in (
        "unit_ghz", "unit_w", "counit_ghz", "counit_w", "ghz_special", "cross_kills_black_unit",
    )]
    rules += [base["ghz_identity"], base["w_identity"]]
    for pname in fusion_rule_names():
        rules += expansions_upto(pname, max_count)
    if name == "arith":
        rules += expansions_upto("delta2_nat", max_count)
        rules += expansions_upto("delta3_nat", max_count)
        rules += expansions_upto("delta1_nat", max_count)
    return RuleSet(rules)
