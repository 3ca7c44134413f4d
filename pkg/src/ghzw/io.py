"""JSON documents for diagrams, pattern graphs and rules.

Output is canonical: vertices sorted by id, edges sorted by source port,
fixed key order and two-space indentation, so fixtures diff cleanly.
Parsing validates against a strict schema (unknown keys are rejected)
and then against the diagram invariants.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional, Union

import jsonschema

from .bang import BangBox, PatternGraph
from .diagram import (
    BOUNDARY_IN,
    BOUNDARY_OUT,
    GHZ,
    W,
    Diagram,
    Edge,
    ParamState,
    Port,
    Vertex,
    validate,
)
from .errors import SchemaError, ValidationError
from .rules import RewriteRule

VERSION = 1

_PAIR = {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}
_ENDPOINT = {
    "type": "array",
    "prefixItems": [
        {"oneOf": [{"type": "integer", "minimum": 0}, {"enum": [BOUNDARY_IN, BOUNDARY_OUT]}]},
        {"type": "integer", "minimum": 0},
    ],
    "minItems": 2,
    "maxItems": 2,
}
_PARAMS = {
    "type": "object",
    "additionalProperties": {"type": "array", "items": _PAIR, "minItems": 2, "maxItems": 2},
}
_INDEX_SET = {"type": "array", "items": {"type": "integer", "minimum": 0}}

DIAGRAM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["version", "inputs", "outputs", "vertices", "edges"],
    "properties": {
        "version": {"const": VERSION},
        "inputs": {"type": "integer", "minimum": 0},
        "outputs": {"type": "integer", "minimum": 0},
        "vertices": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "kind", "in", "out"],
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "kind": {"enum": ["ghz", "w", "param"]},
                    "name": {"type": "string", "minLength": 1},
                    "in": {"type": "integer", "minimum": 0},
                    "out": {"type": "integer", "minimum": 0},
                },
            },
        },
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["src", "dst", "tick", "cross"],
                "properties": {
                    "src": _ENDPOINT,
                    "dst": _ENDPOINT,
                    "tick": {"type": "boolean"},
                    "cross": {"type": "boolean"},
                },
            },
        },
        "boxes": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "vertices"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "vertices": _INDEX_SET,
                    "inputs": _INDEX_SET,
                    "outputs": _INDEX_SET,
                },
            },
        },
        "params": _PARAMS,
    },
}

RULE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["version", "rule", "lhs", "rhs"],
    "properties": {
        "version": {"const": VERSION},
        "rule": {"type": "string", "minLength": 1},
        "provenance": {"type": "string"},
        "scalar_exact": {"type": "boolean"},
        "lhs": {"type": "object"},
        "rhs": {"type": "object"},
    },
}

Document = Union[Diagram, PatternGraph, RewriteRule]


# ---------------------------------------------------------------- writing


def _endpoint(p: Port) -> list:
    return [p.owner, p.index]


def _edge_key(e: Edge):
    def port_key(p: Port):
        return (0, p.index) if p.owner == BOUNDARY_IN else (1, p.owner, p.index)

    return port_key(e.src)


def diagram_to_dict(d: Diagram, boxes=None, params=None) -> dict:
    doc = {
        "version": VERSION,
        "inputs": d.n_inputs,
        "outputs": d.n_outputs,
        "vertices": [],
        "edges": [],
    }
    for vid in sorted(d.vertices):
        v = d.vertices[vid]
        item = {"id": v.id, "kind": v.kind.tag}
        if v.kind.tag == "param":
            item["name"] = v.kind.name
        item["in"] = v.n_in
        item["out"] = v.n_out
        doc["vertices"].append(item)
    for e in sorted(d.edges.values(), key=_edge_key):
        doc["edges"].append(
            {"src": _endpoint(e.src), "dst": _endpoint(e.dst), "tick": bool(e.tick), "cross": bool(e.cross)}
        )
    if boxes:
        doc["boxes"] = []
        for b in sorted(boxes, key=lambda b: b.id):
            item = {"id": b.id, "vertices": sorted(b.vertices)}
            if b.inputs:
                item["inputs"] = sorted(b.inputs)
            if b.outputs:
                item["outputs"] = sorted(b.outputs)
            doc["boxes"].append(item)
    if params:
        doc["params"] = {
            name: [[Fraction(x).numerator, Fraction(x).denominator] for x in params[name]]
            for name in sorted(params)
        }
    return doc


def to_dict(obj: Document, params=None) -> dict:
    if isinstance(obj, RewriteRule):
        return {
            "version": VERSION,
            "rule": obj.name,
            "provenance": obj.provenance,
            "scalar_exact": obj.scalar_exact,
            "lhs": diagram_to_dict(obj.lhs),
            "rhs": diagram_to_dict(obj.rhs),
        }
    if isinstance(obj, PatternGraph):
        return diagram_to_dict(obj.base, obj.boxes, params)
    return diagram_to_dict(obj, None, params)


def serialize(obj: Document, params=None) -> str:
    return json.dumps(to_dict(obj, params), indent=2) + "\n"


# ---------------------------------------------------------------- reading


def _check_schema(doc, schema, where: str) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise SchemaError(f"{where}{path}: {err.message}")


def _port(raw, producer: bool, vertices: dict, where: str) -> Port:
    owner, index = raw
    if isinstance(owner, str):
        if (owner == BOUNDARY_IN) != producer:
            raise SchemaError(f"{where}: boundary owner {owner!r} on the wrong end of an edge")
        return Port(owner, index, producer)
    if owner not in vertices:
        raise SchemaError(f"{where}: edge refers to missing vertex {owner}")
    return Port(owner, index, producer)


def diagram_from_dict(doc: dict, where: str = ""):
    """Parse a diagram document; returns ``(diagram, boxes, params)``."""
    _check_schema(doc, DIAGRAM_SCHEMA, where)
    vertices = {}
    for k, item in enumerate(doc["vertices"]):
        if item["id"] in vertices:
            raise SchemaError(f"{where}vertices/{k}: duplicate vertex id {item['id']}")
        if item["kind"] == "param":
            if "name" not in item:
                raise SchemaError(f"{where}vertices/{k}: param vertex needs a name")
            kind = ParamState(item["name"])
        else:
            if "name" in item:
                raise SchemaError(f"{where}vertices/{k}: only param vertices carry a name")
            kind = GHZ if item["kind"] == "ghz" else W
        vertices[item["id"]] = Vertex(item["id"], kind, item["in"], item["out"])
    edges = []
    for k, item in enumerate(doc["edges"]):
        at = f"{where}edges/{k}"
        src = _port(item["src"], True, vertices, at)
        dst = _port(item["dst"], False, vertices, at)
        edges.append(Edge(k, src, dst, int(item["tick"]), int(item["cross"])))
    d = Diagram(vertices.values(), edges, doc["inputs"], doc["outputs"])
    problems = validate(d)
    if problems:
        raise ValidationError(f"{where}invalid diagram: " + "; ".join(map(str, problems)), problems)
    boxes = [
        BangBox(
            b["id"],
            frozenset(b["vertices"]),
            frozenset(b.get("inputs", ())),
            frozenset(b.get("outputs", ())),
        )
        for b in doc.get("boxes", ())
    ]
    params = {
        name: tuple(Fraction(p, q) if q else _zero_den(where, name) for p, q in pairs)
        for name, pairs in doc.get("params", {}).items()
    }
    return d, boxes, params


def _zero_den(where, name):
    raise SchemaError(f"{where}params/{name}: zero denominator")


def from_dict(doc) -> Document:
    if isinstance(doc, dict) and "rule" in doc:
        _check_schema(doc, RULE_SCHEMA, "")
        lhs, _, _ = diagram_from_dict(doc["lhs"], "lhs/")
        rhs, _, _ = diagram_from_dict(doc["rhs"], "rhs/")
        return RewriteRule(doc["rule"], lhs, rhs, doc.get("provenance", ""), doc.get("scalar_exact", True))
    d, boxes, _ = diagram_from_dict(doc)
    if "boxes" in doc:
        return PatternGraph(d, tuple(boxes))
    return d


def _load(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def parse(text: str) -> Document:
    return from_dict(_load(text))


def parse_with_params(text: str) -> tuple[Document, dict]:
    """Like :func:`parse`, also returning any embedded parameter values."""
    doc = _load(text)
    obj = from_dict(doc)
    params = {}
    if isinstance(doc, dict) and "params" in doc and "rule" not in doc:
        params = diagram_from_dict(doc)[2]
    return obj, params


def parse_environment(text: str) -> dict:
    """An environment file: a JSON object mapping names to ``[[p, q], [p, q]]``."""
    doc = _load(text)
    _check_schema(doc, _PARAMS, "env/")
    env = {}
    for name, pairs in doc.items():
        if any(q == 0 for _, q in pairs):
            raise SchemaError(f"env/{name}: zero denominator")
        env[name] = tuple(Fraction(p, q) for p, q in pairs)
    return env


def to_dot(d: Diagram) -> str:
    """Plain DOT dump: vertices, boundary nodes, decorated edges."""
    lines = ["digraph diagram {"]
    for i in range(d.n_inputs):
        lines.append(f'  in{i} [shape=point, xlabel="in{i}"];')
    for j in range(d.n_outputs):
        lines.append(f'  out{j} [shape=point, xlabel="out{j}"];')
    for vid in sorted(d.vertices):
        v = d.vertices[vid]
        style = {"ghz": "fillcolor=white", "w": "fillcolor=black, fontcolor=white"}.get(v.kind.tag, "shape=box")
        lines.append(f'  v{vid} [label="{v.kind}", style=filled, {style}];')

    def name(p: Port):
        return f"{p.owner}{p.index}" if p.is_boundary else f"v{p.owner}"

    for e in sorted(d.edges.values(), key=_edge_key):
        label = ("x" if e.tick else "") + ("-" if e.cross else "")
        attr = f' [label="{label}"]' if label else ""
        lines.append(f"  {name(e.src)} -> {name(e.dst)}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
