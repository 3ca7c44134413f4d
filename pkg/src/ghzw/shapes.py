"""Named small diagrams used as building blocks by rules, theorems and tests."""
from __future__ import annotations

from .diagram import (
    GHZ,
    W,
    Diagram,
    DiagramBuilder,
    VertexKind,
    compose_par,
    compose_seq,
    identity_diagram,
)
from .errors import BadWireIndex


def spider(kind: VertexKind, m: int, n: int) -> Diagram:
    """A single spider whose legs are the diagram boundary, in order."""
    b = DiagramBuilder(m, n)
    v = b.vertex(kind)
    for i in range(m):
        b.wire(("in", i), v)
    for j in range(n):
        b.wire(v, ("out", j))
    return b.build()


def unit(kind: VertexKind) -> Diagram:
    return spider(kind, 0, 1)


def counit(kind: VertexKind) -> Diagram:
    return spider(kind, 1, 0)


def mult(kind: VertexKind) -> Diagram:
    return spider(kind, 2, 1)


def comult(kind: VertexKind) -> Diagram:
    return spider(kind, 1, 2)


def cup(kind: VertexKind) -> Diagram:
    return spider(kind, 0, 2)


def cap(kind: VertexKind) -> Diagram:
    return spider(kind, 2, 0)


def wire(tick: int = 0, cross: int = 0) -> Diagram:
    b = DiagramBuilder(1, 1)
    b.wire(("in", 0), ("out", 0), tick=tick, cross=cross)
    return b.build()


def circle(kind: VertexKind = W) -> Diagram:
    """Cap after cup of one colour: the closed loop scalar (2 for either colour)."""
    b = DiagramBuilder(0, 0)
    c, k = b.vertex(kind), b.vertex(kind)
    b.wire(c, k).wire(c, k)
    return b.build()


def loop_map(kind: VertexKind) -> Diagram:
    """Multiplication after comultiplication, joined by two parallel wires."""
    b = DiagramBuilder(1, 1)
    d, m = b.vertex(kind), b.vertex(kind)
    b.wire(("in", 0), d).wire(d, m).wire(d, m).wire(m, ("out", 0))
    return b.build()


def lollipop() -> Diagram:
    """Black point with a loop: comultiplication with one output fed back (2|0>)."""
    b = DiagramBuilder(0, 1)
    v = b.w()
    b.wire(v, v).wire(v, ("out", 0))
    return b.build()


def co_lollipop() -> Diagram:
    """Black copoint with a loop (2<1|)."""
    b = DiagramBuilder(1, 0)
    v = b.w()
    b.wire(("in", 0), v).wire(v, v)
    return b.build()


def tick_composite(first: VertexKind, second: VertexKind) -> Diagram:
    """Cap of colour ``first`` bent against the cup of colour ``second``."""
    b = DiagramBuilder(1, 1)
    c = b.vertex(second)  # cup
    k = b.vertex(first)  # cap
    b.wire(("in", 0), k).wire(c, k).wire(c, ("out", 0))
    return b.build()


def point(name: str, tick: int = 0, cross: int = 0) -> Diagram:
    b = DiagramBuilder(0, 1)
    p = b.param(name)
    b.wire(p, ("out", 0), tick=tick, cross=cross)
    return b.build()


def phase(name: str, tick: int = 0) -> Diagram:
    """White phase of a parameter point: diag(psi0, psi1); ``tick`` gives diag(psi1, psi0)."""
    b = DiagramBuilder(1, 1)
    g, p = b.ghz(), b.param(name)
    b.wire(("in", 0), g).wire(p, g, tick=tick).wire(g, ("out", 0))
    return b.build()


def pendant(state: Diagram, tick: int = 0) -> Diagram:
    """Closed scalar: a (0,1) state, optionally ticked, fed into the black counit."""
    return compose_seq(compose_seq(state, wire(tick)), counit(W))


def plug(d: Diagram, state: Diagram, wire_index: int) -> Diagram:
    """Feed a (0,1) state into input ``wire_index`` of ``d``."""
    n = d.n_inputs
    if not 0 <= wire_index < n:
        raise BadWireIndex(f"wire {wire_index} out of range for {n} inputs")
    feed = compose_par(
        compose_par(identity_diagram(wire_index), state),
        identity_diagram(n - wire_index - 1),
    )
    return compose_seq(feed, d)


def tensor_all(*ds: Diagram) -> Diagram:
    out = identity_diagram(0)
    for d in ds:
        out = compose_par(out, d)
    return out


def seq_all(*ds: Diagram) -> Diagram:
    out = ds[0]
    for d in ds[1:]:
        out = compose_seq(out, d)
    return out
