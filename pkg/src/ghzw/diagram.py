"""Open port graphs for GHZ/W string diagrams.

A :class:`Diagram` is an immutable value.  Vertices are generator boxes
(GHZ spiders, W spiders, named parameter states) with an explicit split of
legs into inputs and outputs.  Every wire is an :class:`Edge` from a
*producer* port (a vertex output or a diagram input) to a *consumer* port
(a vertex input or a diagram output), carrying two parity decorations:

* ``tick`` -- the Pauli X obtained by composing the cap of one colour with
  the cup of the other,
* ``cross`` -- the white phase ``-Z``.

On a wire the decorations act tick first, then cross, reading from the
source to the target.

Two diagrams are the same when :func:`is_isomorphic` says so; vertex and
edge ids carry no meaning.
"""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Optional, Union

import networkx as nx
from networkx.algorithms import isomorphism as nx_iso

from .errors import (
    ArityViolation,
    BadPort,
    BoundaryMismatch,
    DirectionMismatch,
    InvalidDiagram,
    PortTaken,
    ZeroArity,
)

BOUNDARY_IN = "in"
BOUNDARY_OUT = "out"

Owner = Union[int, str]


@dataclass(frozen=True, order=True)
class VertexKind:
    """Generator type of a vertex: ``ghz``, ``w`` or ``param`` (with a name)."""

    tag: str
    name: Optional[str] = None

    def __post_init__(self):
        if self.tag not in ("ghz", "w", "param"):
            raise ValueError(f"unknown vertex kind {self.tag!r}")
        if (self.tag == "param") != (self.name is not None):
            raise ValueError("exactly the param kind carries a name")

    @property
    def is_spider(self) -> bool:
        return self.tag != "param"

    def __str__(self):
        return f"param({self.name})" if self.tag == "param" else self.tag


GHZ = VertexKind("ghz")
W = VertexKind("w")


def ParamState(name: str) -> VertexKind:
    return VertexKind("param", name)


@dataclass(frozen=True)
class Vertex:
    id: int
    kind: VertexKind
    n_in: int
    n_out: int


class Port(NamedTuple):
    """A leg of a vertex or of the diagram boundary.

    ``producer`` ports emit a wire (vertex outputs, diagram inputs);
    consumer ports absorb one (vertex inputs, diagram outputs).
    """

    owner: Owner
    index: int
    producer: bool

    @property
    def is_boundary(self) -> bool:
        return isinstance(self.owner, str)

    def __str__(self):
        if self.owner == BOUNDARY_IN:
            return f"in[{self.index}]"
        if self.owner == BOUNDARY_OUT:
            return f"out[{self.index}]"
        side = "out" if self.producer else "in"
        return f"v{self.owner}.{side}[{self.index}]"


def out_port(v: int, i: int) -> Port:
    return Port(v, i, True)


def in_port(v: int, i: int) -> Port:
    return Port(v, i, False)


def input_port(i: int) -> Port:
    return Port(BOUNDARY_IN, i, True)


def output_port(j: int) -> Port:
    return Port(BOUNDARY_OUT, j, False)


@dataclass(frozen=True)
class Edge:
    id: int
    src: Port
    dst: Port
    tick: int = 0
    cross: int = 0

    @property
    def decoration(self) -> tuple[int, int]:
        return (self.tick, self.cross)

    @property
    def is_passthrough(self) -> bool:
        return self.src.is_boundary and self.dst.is_boundary


class Violation(NamedTuple):
    code: str
    detail: str

    def __str__(self):
        return f"{self.code}: {self.detail}"


class Diagram:
    """Immutable open port graph.  Build with the module functions or
    :class:`DiagramBuilder`; every operation returns a new diagram."""

    __slots__ = ("_vertices", "_edges", "n_inputs", "n_outputs", "_ports")

    def __init__(
        self,
        vertices: Iterable[Vertex] = (),
        edges: Iterable[Edge] = (),
        n_inputs: int = 0,
        n_outputs: int = 0,
    ):
        self._vertices = {v.id: v for v in vertices}
        self._edges = {e.id: e for e in edges}
        if n_inputs < 0 or n_outputs < 0:
            raise ValueError("boundary sizes must be nonnegative")
        self.n_inputs = n_inputs
        self.n_outputs = n_outputs
        self._ports = None

    @property
    def vertices(self) -> Mapping[int, Vertex]:
        return MappingProxyType(self._vertices)

    @property
    def edges(self) -> Mapping[int, Edge]:
        return MappingProxyType(self._edges)

    @property
    def signature(self) -> tuple[int, int]:
        return (self.n_inputs, self.n_outputs)

    @property
    def is_closed(self) -> bool:
        return self.n_inputs == 0 and self.n_outputs == 0

    def _port_index(self) -> dict[Port, int]:
        if self._ports is None:
            index = {}
            for e in self._edges.values():
                index.setdefault(e.src, e.id)
                index.setdefault(e.dst, e.id)
            self._ports = index
        return self._ports

    def edge_at(self, port: Port) -> Optional[Edge]:
        eid = self._port_index().get(port)
        return None if eid is None else self._edges[eid]

    def input_edge(self, i: int) -> Edge:
        return self.edge_at(input_port(i))

    def output_edge(self, j: int) -> Edge:
        return self.edge_at(output_port(j))

    def free_ports(self) -> list[Port]:
        """Ports not yet attached to any edge, in a stable order."""
        taken = self._port_index()
        free = []
        for i in range(self.n_inputs):
            if input_port(i) not in taken:
                free.append(input_port(i))
        for j in range(self.n_outputs):
            if output_port(j) not in taken:
                free.append(output_port(j))
        for vid in sorted(self._vertices):
            v = self._vertices[vid]
            free.extend(p for p in (in_port(vid, k) for k in range(v.n_in)) if p not in taken)
            free.extend(p for p in (out_port(vid, k) for k in range(v.n_out)) if p not in taken)
        return free

    def next_vertex_id(self) -> int:
        return max(self._vertices, default=-1) + 1

    def next_edge_id(self) -> int:
        return max(self._edges, default=-1) + 1

    def _key(self):
        return (
            self.n_inputs,
            self.n_outputs,
            frozenset(self._vertices.values()),
            frozenset(self._edges.values()),
        )

    def __eq__(self, other):
        if not isinstance(other, Diagram):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __rshift__(self, other: "Diagram") -> "Diagram":
        return compose_seq(self, other)

    def __matmul__(self, other: "Diagram") -> "Diagram":
        return compose_par(self, other)

    def __repr__(self):
        return (
            f"Diagram({self.n_inputs}->{self.n_outputs}, "
            f"{len(self._vertices)} vertices, {len(self._edges)} edges)"
        )


# ---------------------------------------------------------------- construction


def _check_kind_arity(kind: VertexKind, m: int, n: int) -> None:
    if m < 0 or n < 0:
        raise ArityViolation(f"negative arity ({m}, {n})")
    if kind.tag == "param" and (m, n) != (0, 1):
        raise ArityViolation(f"parameter state {kind.name!r} must have arity (0, 1), got ({m}, {n})")
    if m == 0 and n == 0:
        raise ZeroArity(f"{kind} vertex with no legs")


def empty_diagram(n_inputs: int = 0, n_outputs: int = 0) -> Diagram:
    """A diagram with declared but unconnected boundary ports."""
    return Diagram((), (), n_inputs, n_outputs)


def identity_diagram(k: int) -> Diagram:
    edges = [Edge(i, input_port(i), output_port(i)) for i in range(k)]
    return Diagram((), edges, k, k)


def add_vertex(d: Diagram, kind: VertexKind, m: int, n: int) -> tuple[Diagram, int]:
    _check_kind_arity(kind, m, n)
    vid = d.next_vertex_id()
    vertices = list(d.vertices.values()) + [Vertex(vid, kind, m, n)]
    return Diagram(vertices, d.edges.values(), d.n_inputs, d.n_outputs), vid


def _port_exists(d: Diagram, p: Port) -> bool:
    if p.owner == BOUNDARY_IN:
        return p.producer and 0 <= p.index < d.n_inputs
    if p.owner == BOUNDARY_OUT:
        return (not p.producer) and 0 <= p.index < d.n_outputs
    v = d.vertices.get(p.owner)
    if v is None:
        return False
    return 0 <= p.index < (v.n_out if p.producer else v.n_in)


def connect(d: Diagram, src: Port, dst: Port, tick: int = 0, cross: int = 0) -> Diagram:
    if not src.producer or dst.producer:
        raise DirectionMismatch(f"edge must run from a producer to a consumer, got {src} -> {dst}")
    for p in (src, dst):
        if not _port_exists(d, p):
            raise BadPort(f"no such port {p}")
        if d.edge_at(p) is not None:
            raise PortTaken(f"port {p} is already connected")
    edges = list(d.edges.values()) + [Edge(d.next_edge_id(), src, dst, tick & 1, cross & 1)]
    return Diagram(d.vertices.values(), edges, d.n_inputs, d.n_outputs)


def remove_vertex(d: Diagram, vid: int) -> Diagram:
    """Drop a vertex but keep its edges; the result usually fails :func:`validate`."""
    vertices = [v for v in d.vertices.values() if v.id != vid]
    return Diagram(vertices, d.edges.values(), d.n_inputs, d.n_outputs)


def remove_edge(d: Diagram, eid: int) -> Diagram:
    edges = [e for e in d.edges.values() if e.id != eid]
    return Diagram(d.vertices.values(), edges, d.n_inputs, d.n_outputs)


def _shift_port(p: Port, offset: int) -> Port:
    return p if p.is_boundary else Port(p.owner + offset, p.index, p.producer)


def compose_seq(d1: Diagram, d2: Diagram) -> Diagram:
    """``d2`` after ``d1``: output ``i`` of ``d1`` is fused with input ``i`` of ``d2``."""
    if d1.n_outputs != d2.n_inputs:
        raise BoundaryMismatch(
            f"cannot compose {d1.n_inputs}->{d1.n_outputs} with {d2.n_inputs}->{d2.n_outputs}"
        )
    offset = d1.next_vertex_id()
    vertices = list(d1.vertices.values())
    vertices += [Vertex(v.id + offset, v.kind, v.n_in, v.n_out) for v in d2.vertices.values()]

    edges = []
    for e in sorted(d1.edges.values(), key=lambda e: e.id):
        if e.dst.owner != BOUNDARY_OUT:
            edges.append((e.src, e.dst, e.tick, e.cross))
    for i in range(d1.n_outputs):
        e1, e2 = d1.output_edge(i), d2.input_edge(i)
        if e1 is None or e2 is None:
            raise InvalidDiagram([Violation("UnconnectedPort", f"boundary wire {i} of the composite")])
        edges.append((e1.src, _shift_port(e2.dst, offset), e1.tick ^ e2.tick, e1.cross ^ e2.cross))
    for e in sorted(d2.edges.values(), key=lambda e: e.id):
        if e.src.owner != BOUNDARY_IN:
            edges.append((_shift_port(e.src, offset), _shift_port(e.dst, offset), e.tick, e.cross))
    return Diagram(
        vertices,
        [Edge(k, *spec) for k, spec in enumerate(edges)],
        d1.n_inputs,
        d2.n_outputs,
    )


def compose_par(d1: Diagram, d2: Diagram) -> Diagram:
    """Juxtaposition; the boundary of ``d2`` is numbered after that of ``d1``."""
    offset = d1.next_vertex_id()

    def move(p: Port) -> Port:
        if p.owner == BOUNDARY_IN:
            return input_port(p.index + d1.n_inputs)
        if p.owner == BOUNDARY_OUT:
            return output_port(p.index + d1.n_outputs)
        return Port(p.owner + offset, p.index, p.producer)

    vertices = list(d1.vertices.values())
    vertices += [Vertex(v.id + offset, v.kind, v.n_in, v.n_out) for v in d2.vertices.values()]
    edges = [(e.src, e.dst, e.tick, e.cross) for e in sorted(d1.edges.values(), key=lambda e: e.id)]
    edges += [
        (move(e.src), move(e.dst), e.tick, e.cross)
        for e in sorted(d2.edges.values(), key=lambda e: e.id)
    ]
    return Diagram(
        vertices,
        [Edge(k, *spec) for k, spec in enumerate(edges)],
        d1.n_inputs + d2.n_inputs,
        d1.n_outputs + d2.n_outputs,
    )


def decorate_output(d: Diagram, j: int, tick: int = 0, cross: int = 0) -> Diagram:
    """Toggle decorations on the wire feeding output ``j``."""
    e = d.output_edge(j)
    if e is None:
        raise BadPort(f"output {j} is not connected")
    edges = [x for x in d.edges.values() if x.id != e.id]
    edges.append(Edge(e.id, e.src, e.dst, e.tick ^ (tick & 1), e.cross ^ (cross & 1)))
    return Diagram(d.vertices.values(), edges, d.n_inputs, d.n_outputs)


def permute_outputs(d: Diagram, perm) -> Diagram:
    """Output ``j`` of the result is output ``perm[j]`` of ``d``."""
    perm = list(perm)
    if sorted(perm) != list(range(d.n_outputs)):
        raise BoundaryMismatch(f"{perm} is not a permutation of {d.n_outputs} outputs")
    where = {old: new for new, old in enumerate(perm)}
    edges = []
    for e in d.edges.values():
        dst = output_port(where[e.dst.index]) if e.dst.owner == BOUNDARY_OUT else e.dst
        edges.append(Edge(e.id, e.src, dst, e.tick, e.cross))
    return Diagram(d.vertices.values(), edges, d.n_inputs, d.n_outputs)


def relabel(d: Diagram) -> Diagram:
    """Renumber vertices and edges densely from 0, preserving their order."""
    vmap = {vid: k for k, vid in enumerate(sorted(d.vertices))}
    vertices = [Vertex(vmap[v.id], v.kind, v.n_in, v.n_out) for v in d.vertices.values()]

    def move(p: Port) -> Port:
        return p if p.is_boundary else Port(vmap.get(p.owner, p.owner), p.index, p.producer)

    edges = [
        Edge(k, move(e.src), move(e.dst), e.tick, e.cross)
        for k, e in enumerate(sorted(d.edges.values(), key=lambda e: e.id))
    ]
    return Diagram(vertices, edges, d.n_inputs, d.n_outputs)


class DiagramBuilder:
    """Mutable scratchpad for writing diagrams by hand.

    Vertex arities are inferred from the wires attached when :meth:`build`
    runs, and legs are numbered in the order wires are added::

        b = DiagramBuilder(2, 1)
        m = b.w()
        b.wire(("in", 0), m)
        b.wire(("in", 1), m)
        b.wire(m, ("out", 0))
        add = b.build()
    """

    def __init__(self, n_inputs: int = 0, n_outputs: int = 0):
        self.n_inputs = n_inputs
        self.n_outputs = n_outputs
        self._kinds: dict[int, VertexKind] = {}
        self._legs_in: dict[int, int] = {}
        self._legs_out: dict[int, int] = {}
        self._edges: list[tuple[Port, Port, int, int]] = []

    def vertex(self, kind: VertexKind) -> int:
        vid = len(self._kinds)
        self._kinds[vid] = kind
        self._legs_in[vid] = 0
        self._legs_out[vid] = 0
        return vid

    def ghz(self) -> int:
        return self.vertex(GHZ)

    def w(self) -> int:
        return self.vertex(W)

    def param(self, name: str) -> int:
        return self.vertex(ParamState(name))

    def wire(self, src, dst, tick: int = 0, cross: int = 0) -> "DiagramBuilder":
        if isinstance(src, tuple):
            if src[0] != BOUNDARY_IN:
                raise DirectionMismatch(f"boundary source must be an input, got {src}")
            p = input_port(src[1])
        else:
            p = out_port(src, self._legs_out[src])
            self._legs_out[src] += 1
        if isinstance(dst, tuple):
            if dst[0] != BOUNDARY_OUT:
                raise DirectionMismatch(f"boundary target must be an output, got {dst}")
            q = output_port(dst[1])
        else:
            q = in_port(dst, self._legs_in[dst])
            self._legs_in[dst] += 1
        self._edges.append((p, q, tick & 1, cross & 1))
        return self

    def build(self) -> Diagram:
        vertices = []
        for vid, kind in self._kinds.items():
            m, n = self._legs_in[vid], self._legs_out[vid]
            _check_kind_arity(kind, m, n)
            vertices.append(Vertex(vid, kind, m, n))
        d = Diagram(
            vertices,
            [Edge(k, *spec) for k, spec in enumerate(self._edges)],
            self.n_inputs,
            self.n_outputs,
        )
        problems = validate(d)
        if problems:
            raise InvalidDiagram(problems)
        return d


# ---------------------------------------------------------------- validation


def validate(d: Diagram) -> list[Violation]:
    """All invariant violations of ``d``; empty iff ``d`` is a valid diagram."""
    out: list[Violation] = []
    for v in sorted(d.vertices.values(), key=lambda v: v.id):
        try:
            _check_kind_arity(v.kind, v.n_in, v.n_out)
        except ArityViolation as exc:
            out.append(Violation("ArityViolation", f"v{v.id}: {exc}"))
        except ZeroArity as exc:
            out.append(Violation("ZeroArity", f"v{v.id}: {exc}"))

    seen: dict[Port, int] = {}
    for e in sorted(d.edges.values(), key=lambda e: e.id):
        if e.tick not in (0, 1) or e.cross not in (0, 1):
            out.append(Violation("BadDecoration", f"edge {e.id} decorations must be bits"))
        if not e.src.producer or e.dst.producer:
            out.append(Violation("DirectionMismatch", f"edge {e.id}: {e.src} -> {e.dst}"))
            continue
        for p in (e.src, e.dst):
            if not p.is_boundary and p.owner not in d.vertices:
                out.append(Violation("DanglingEdge", f"edge {e.id} references missing vertex {p.owner}"))
            elif not _port_exists(d, p):
                out.append(Violation("BadPortIndex", f"edge {e.id} uses nonexistent port {p}"))
            elif p in seen:
                out.append(Violation("PortTaken", f"port {p} used by edges {seen[p]} and {e.id}"))
            else:
                seen[p] = e.id

    for i in range(d.n_inputs):
        if input_port(i) not in seen:
            out.append(Violation("UnconnectedPort", str(input_port(i))))
    for j in range(d.n_outputs):
        if output_port(j) not in seen:
            out.append(Violation("UnconnectedPort", str(output_port(j))))
    for vid in sorted(d.vertices):
        v = d.vertices[vid]
        for k in range(v.n_in):
            if in_port(vid, k) not in seen:
                out.append(Violation("UnconnectedPort", str(in_port(vid, k))))
        for k in range(v.n_out):
            if out_port(vid, k) not in seen:
                out.append(Violation("UnconnectedPort", str(out_port(vid, k))))
    return out


def ensure_valid(d: Diagram) -> Diagram:
    problems = validate(d)
    if problems:
        raise InvalidDiagram(problems)
    return d


# ---------------------------------------------------------------- isomorphism


def _as_multigraph(d: Diagram) -> nx.MultiDiGraph:
    g = nx.MultiDiGraph()
    for v in d.vertices.values():
        g.add_node(("v", v.id), label=(v.kind.tag, v.kind.name or "", v.n_in, v.n_out))
    for i in range(d.n_inputs):
        g.add_node(("in", i), label=("in", i))
    for j in range(d.n_outputs):
        g.add_node(("out", j), label=("out", j))

    def node(p: Port):
        return (p.owner, p.index) if p.is_boundary else ("v", p.owner)

    for e in d.edges.values():
        g.add_edge(node(e.src), node(e.dst), dec=(e.tick, e.cross))
    return g


def is_isomorphic(d1: Diagram, d2: Diagram) -> bool:
    """Graph isomorphism preserving kinds, arities, decorations and the
    boundary numbering.

    Legs of a spider are interchangeable within each direction (all
    generators are commutative and cocommutative), so only the partition
    of a vertex's legs into inputs and outputs is compared.
    """
    if d1.signature != d2.signature:
        return False
    if len(d1.vertices) != len(d2.vertices) or len(d1.edges) != len(d2.edges):
        return False
    g1, g2 = _as_multigraph(d1), _as_multigraph(d2)
    matcher = nx_iso.MultiDiGraphMatcher(
        g1,
        g2,
        node_match=nx_iso.categorical_node_match("label", None),
        edge_match=nx_iso.categorical_multiedge_match("dec", None),
    )
    return matcher.is_isomorphic()
