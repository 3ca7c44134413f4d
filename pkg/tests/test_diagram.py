import pytest

from ghzw import GHZ, W, DiagramBuilder, compose_par, compose_seq, is_isomorphic, validate
from ghzw.diagram import (
    Diagram,
    Edge,
    Vertex,
    decorate_output,
    identity_diagram,
    in_port,
    input_port,
    out_port,
    output_port,
    permute_outputs,
    relabel,
)
from ghzw import shapes


def test_builder_and_signature():
    b = DiagramBuilder(2, 1)
    m = b.ghz()
    b.wire(("in", 0), m).wire(("in", 1), m).wire(m, ("out", 0))
    d = b.build()
    assert d.signature == (2, 1)
    assert d.vertices[m].n_in == 2 and d.vertices[m].n_out == 1
    assert not validate(d)


def test_validate_reports_dangling_port():
    v = Vertex(0, GHZ, 1, 1)
    d = Diagram([v], [Edge(0, input_port(0), in_port(0, 0), 0, 0)], 1, 0)
    problems = validate(d)
    assert problems
    assert any("0" in str(p) for p in problems)


def test_validate_reports_port_reuse():
    v = Vertex(0, W, 0, 1)
    edges = [
        Edge(0, out_port(0, 0), output_port(0), 0, 0),
        Edge(1, out_port(0, 0), output_port(1), 0, 0),
    ]
    assert validate(Diagram([v], edges, 0, 2))


def test_compose_seq_signature_mismatch():
    with pytest.raises(Exception):
        compose_seq(shapes.unit(GHZ), shapes.unit(W))


def test_compose_par_stacks_boundaries():
    d = compose_par(shapes.mult(W), shapes.wire())
    assert d.signature == (3, 2)
    assert not validate(d)


def test_identity_and_relabel_isomorphic():
    d = compose_seq(shapes.comult(GHZ), shapes.mult(W))
    assert is_isomorphic(d, relabel(d))
    assert identity_diagram(2).signature == (2, 2)


def test_isomorphism_sees_colour_and_decoration():
    assert not is_isomorphic(shapes.unit(GHZ), shapes.unit(W))
    assert not is_isomorphic(shapes.wire(tick=1), shapes.wire(cross=1))
    assert is_isomorphic(shapes.wire(tick=1), shapes.wire(tick=1))


def test_isomorphism_ignores_leg_order_within_direction():
    a = DiagramBuilder(2, 1)
    m = a.w()
    a.wire(("in", 0), m, tick=1).wire(("in", 1), m).wire(m, ("out", 0))
    b = DiagramBuilder(2, 1)
    m = b.w()
    b.wire(("in", 1), m).wire(("in", 0), m, tick=1).wire(m, ("out", 0))
    assert is_isomorphic(a.build(), b.build())


def test_boundary_order_matters_for_isomorphism():
    a = DiagramBuilder(0, 2)
    a.wire(a.ghz(), ("out", 0)).wire(a.w(), ("out", 1))
    swapped = permute_outputs(a.build(), [1, 0])
    assert not is_isomorphic(a.build(), swapped)


def test_decorate_output_xors():
    d = decorate_output(decorate_output(shapes.wire(), 0, tick=1), 0, tick=1)
    assert d.output_edge(0).decoration == (0, 0)
