"""Random valid diagrams for property tests."""
from __future__ import annotations

import random
from typing import Optional

from .diagram import GHZ, W, Diagram, Edge, ParamState, Vertex, compose_par, compose_seq, identity_diagram, in_port, input_port, out_port, output_port


def random_diagram(
    rng: random.Random,
    max_vertices: int = 6,
    max_legs: int = 3,
    params: tuple = (),
    max_boundary: int = 3,
    decorate: bool = True,
) -> Diagram:
    """A random valid diagram; wiring is a uniform bijection of producers to consumers."""
    n = rng.randint(0, max_vertices)
    vertices = []
    for vid in range(n):
        if params and rng.random() < 0.15:
            vertices.append(Vertex(vid, ParamState(rng.choice(params)), 0, 1))
            continue
        kind = rng.choice((GHZ, W))
        while True:
            m, k = rng.randint(0, max_legs), rng.randint(0, max_legs)
            if m or k:
                break
        vertices.append(Vertex(vid, kind, m, k))
    outs = sum(v.n_out for v in vertices)
    ins = sum(v.n_in for v in vertices)
    n_inputs = rng.randint(0, max_boundary)
    n_outputs = outs + n_inputs - ins
    if n_outputs < 0:
        n_inputs -= n_outputs
        n_outputs = 0
    producers = [input_port(i) for i in range(n_inputs)]
    consumers = [output_port(j) for j in range(n_outputs)]
    for v in vertices:
        producers += [out_port(v.id, k) for k in range(v.n_out)]
        consumers += [in_port(v.id, k) for k in range(v.n_in)]
    rng.shuffle(consumers)
    edges = []
    for k, (src, dst) in enumerate(zip(producers, consumers)):
        tick = rng.randint(0, 1) if decorate else 0
        cross = rng.randint(0, 1) if decorate else 0
        edges.append(Edge(k, src, dst, tick, cross))
    return Diagram(vertices, edges, n_inputs, n_outputs)


def random_state(rng: random.Random, n_outputs: int, depth: int = 3) -> Diagram:
    """A random (0, n_outputs) diagram."""
    while True:
        d = random_diagram(rng, max_vertices=depth, max_boundary=0)
        if d.n_inputs == 0 and d.n_outputs == n_outputs:
            return d


def embed(
    rng: random.Random,
    piece: Diagram,
    extra_wires: Optional[int] = None,
    max_vertices: int = 3,
) -> Diagram:
    """Host ``Q . (piece (x) id_k) . P`` with random ``P`` and ``Q``.

    ``P`` has undecorated outputs so the piece's input decorations are
    exactly those of the piece; the same holds for the inputs of ``Q``.
    """
    k = rng.randint(0, 2) if extra_wires is None else extra_wires
    mid = compose_par(piece, identity_diagram(k))
    p = _random_with_outputs(rng, mid.n_inputs, max_vertices)
    q = _random_with_inputs(rng, mid.n_outputs, max_vertices)
    return compose_seq(compose_seq(p, mid), q)


def _strip(d: Diagram, outputs: bool) -> Diagram:
    edges = []
    for e in d.edges.values():
        boundary = e.dst.is_boundary if outputs else e.src.is_boundary
        edges.append(Edge(e.id, e.src, e.dst, 0, 0) if boundary else e)
    return Diagram(d.vertices.values(), edges, d.n_inputs, d.n_outputs)


def _random_with_outputs(rng, n_outputs, max_vertices):
    while True:
        d = random_diagram(rng, max_vertices=max_vertices, max_boundary=2)
        if d.n_outputs == n_outputs:
            return _strip(d, outputs=True)


def _random_with_inputs(rng, n_inputs, max_vertices):
    while True:
        d = random_diagram(rng, max_vertices=max_vertices, max_boundary=n_inputs)
        if d.n_inputs == n_inputs and d.n_outputs <= 3:
            return _strip(d, outputs=False)
