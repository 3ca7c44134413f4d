"""Exact evaluation of diagrams in the qubit model.

Generators::

    GHZ spider (m, n)   sum_x |x..x><x..x|
    W spider (m, n)     Delta_n . mu_m  with
                        mu_m: |1..1> -> |1>, one zero -> |0>, else 0;  mu_0 = |1>
                        Delta_n: |0> -> |0..0>, |1> -> sum of one-hot states;  Delta_0 = <0|
    ParamState(name)    env[name]

Wire decorations: tick = X, cross = diag(-1, 1), applied tick first.

All arithmetic is over the rationals.  Parameter vectors are scaled to
integers before contraction so the kernels only ever see ints; the
common denominator is divided out at the end.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Mapping, Optional, Sequence

from . import kernels
from .diagram import BOUNDARY_IN, BOUNDARY_OUT, Diagram, VertexKind, in_port, out_port, validate
from .errors import InvalidDiagram, NotClosed, ShapeMismatch, UnknownParam

Environment = Mapping[str, Sequence[Fraction]]


@dataclass(frozen=True)
class Tensor:
    """Dense tensor indexed by (inputs..., outputs...), big-endian over wires."""

    n_inputs: int
    n_outputs: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != 1 << (self.n_inputs + self.n_outputs):
            raise ShapeMismatch(
                f"{len(self.entries)} entries for signature ({self.n_inputs}, {self.n_outputs})"
            )

    @classmethod
    def from_ints(cls, n_inputs, n_outputs, values) -> "Tensor":
        return cls(n_inputs, n_outputs, tuple(Fraction(v) for v in values))

    @classmethod
    def from_matrix(cls, rows) -> "Tensor":
        """Build from a matrix with ``rows[out][in]`` (outputs index rows)."""
        n_out = (len(rows) - 1).bit_length()
        n_in = (len(rows[0]) - 1).bit_length()
        ents = [Fraction(0)] * (1 << (n_in + n_out))
        for o, row in enumerate(rows):
            for i, val in enumerate(row):
                ents[(i << n_out) | o] = Fraction(val)
        return cls(n_in, n_out, tuple(ents))

    @classmethod
    def ket(cls, amplitudes: Mapping[str, object]) -> "Tensor":
        """State from a bitstring map, e.g. ``{"00": 1, "11": 1}``."""
        n = len(next(iter(amplitudes)))
        ents = [Fraction(0)] * (1 << n)
        for bits, amp in amplitudes.items():
            ents[int(bits, 2)] = Fraction(amp)
        return cls(0, n, tuple(ents))

    @property
    def signature(self) -> tuple[int, int]:
        return (self.n_inputs, self.n_outputs)

    def matrix(self) -> list[list[Fraction]]:
        """Rows indexed by output basis state, columns by input basis state."""
        n_out = self.n_outputs
        return [
            [self.entries[(i << n_out) | o] for i in range(1 << self.n_inputs)]
            for o in range(1 << n_out)
        ]

    def is_zero(self) -> bool:
        return not any(self.entries)

    def scaled(self, c) -> "Tensor":
        c = Fraction(c)
        return Tensor(self.n_inputs, self.n_outputs, tuple(c * x for x in self.entries))

    def __str__(self):
        return " ".join(str(x) for x in self.entries)


# ---------------------------------------------------------------- generators


def _w_entry(ins: Sequence[int], outs: Sequence[int]) -> int:
    zeros = len(ins) - sum(ins)
    if zeros == 0:
        mid = 1
    elif zeros == 1:
        mid = 0
    else:
        return 0
    ones = sum(outs)
    if mid == 0:
        return 1 if ones == 0 else 0
    if not outs:
        return 0  # <0|1>
    return 1 if ones == 1 else 0


def _generator_ints(kind: VertexKind, m: int, n: int) -> list[int]:
    if kind.tag == "ghz":
        r = m + n
        ents = [0] * (1 << r)
        ents[0] = 1
        ents[-1] = 1
        return ents
    if kind.tag == "w":
        return [
            _w_entry(bits[:m], bits[m:]) for bits in product((0, 1), repeat=m + n)
        ]
    raise ValueError(f"{kind} is not a spider")


def _param_vector(env: Environment, name: str) -> tuple[Fraction, Fraction]:
    if name not in env:
        raise UnknownParam(f"no value for parameter {name!r}")
    vec = tuple(Fraction(x) for x in env[name])
    if len(vec) != 2:
        raise ShapeMismatch(f"parameter {name!r} must be a 2-vector")
    return vec


def generator_tensor(kind: VertexKind, m: int, n: int, env: Optional[Environment] = None) -> Tensor:
    if kind.tag == "param":
        if (m, n) != (0, 1):
            raise ShapeMismatch("parameter states have signature (0, 1)")
        return Tensor(0, 1, _param_vector(env or {}, kind.name))
    return Tensor.from_ints(m, n, _generator_ints(kind, m, n))


_DIRECT_RANK = 3


def _spider_pieces(kind: VertexKind, ins: list, outs: list, fresh) -> list:
    """Tensors of a spider, split into a tree of small ones when it is large.

    Uses ``spider(m, n) = Delta_n . mu_m`` with both halves built from the
    binary (co)multiplication, so no tensor of rank above 3 is created.
    """
    if len(ins) + len(outs) <= _DIRECT_RANK:
        return [(ins + outs, _generator_ints(kind, len(ins), len(outs)))]
    mult, comult = _generator_ints(kind, 2, 1), _generator_ints(kind, 1, 2)
    pieces = []
    if not ins:
        cur = ("s", next(fresh))
        pieces.append(([cur], _generator_ints(kind, 0, 1)))
    else:
        cur = ins[0]
        for lab in ins[1:]:
            nxt = ("s", next(fresh))
            pieces.append(([cur, lab, nxt], mult))
            cur = nxt
    if not outs:
        pieces.append(([cur], _generator_ints(kind, 1, 0)))
        return pieces
    for lab in outs[:-1]:
        nxt = ("s", next(fresh))
        pieces.append(([cur, lab, nxt], comult))
        cur = nxt
    pieces.append(([cur, outs[-1]], [1, 0, 0, 1]))
    return pieces


# ---------------------------------------------------------------- contraction

_TICK = (0, 1, 1, 0)


def _wire_matrix(tick: int, cross: int):
    """Row-major 2x2 integer matrix of a decorated wire (cross . tick)."""
    m = _TICK if tick else (1, 0, 0, 1)
    if cross:
        m = (-m[0], -m[1], m[2], m[3])
    return m


def _transpose(m):
    return (m[0], m[2], m[1], m[3])


class _Net:
    """Working set of integer tensors with edge labels on their axes."""

    def __init__(self):
        self.tensors: list[tuple[list, list[int]]] = []

    def add(self, labels, data):
        self.tensors.append((list(labels), list(data)))

    def close_self_loops(self, k):
        labels, data = self.tensors[k]
        while True:
            seen = {}
            pair = None
            for ax, lab in enumerate(labels):
                if lab in seen:
                    pair = (seen[lab], ax)
                    break
                seen[lab] = ax
            if pair is None:
                break
            data = kernels.trace(data, len(labels), pair[0], pair[1])
            labels = [lab for ax, lab in enumerate(labels) if ax not in pair]
        self.tensors[k] = (labels, data)

    def contract_all(self):
        """Greedy pairwise contraction: always the pair giving the smallest rank."""
        for k in range(len(self.tensors)):
            self.close_self_loops(k)
        live = dict(enumerate(self.tensors))
        owners: dict = {}
        for k, (labels, _) in live.items():
            for lab in labels:
                owners.setdefault(lab, []).append(k)
        while True:
            shared: dict = {}
            for ks in owners.values():
                if len(ks) == 2:
                    pair = (min(ks), max(ks))
                    shared[pair] = shared.get(pair, 0) + 1
            if not shared:
                break
            _, i, j = min(
                (len(live[i][0]) + len(live[j][0]) - 2 * c, i, j) for (i, j), c in shared.items()
            )
            merged = self._merge(live[i], live[j])
            for lab in set(live[i][0]) | set(live[j][0]):
                if lab in merged[0]:
                    owners[lab] = [i if k in (i, j) else k for k in owners[lab]]
                else:
                    del owners[lab]
            live[i] = merged
            del live[j]
        # disconnected components: outer products
        rest = [live[k] for k in sorted(live)]
        while len(rest) > 1:
            rest[0:2] = [self._merge(rest[0], rest[1])]
        self.tensors = rest

    @staticmethod
    def _merge(ta, tb):
        la, a = ta
        lb, b = tb
        pairs = [(ai, lb.index(lab)) for ai, lab in enumerate(la) if lab in lb]
        con = {p[0] for p in pairs}
        conb = {p[1] for p in pairs}
        labels = [lab for ax, lab in enumerate(la) if ax not in con]
        labels += [lab for ax, lab in enumerate(lb) if ax not in conb]
        return labels, kernels.contract(a, len(la), b, len(lb), pairs)


def evaluate(d: Diagram, env: Optional[Environment] = None) -> Tensor:
    """Contract the whole network to its exact tensor."""
    problems = validate(d)
    if problems:
        raise InvalidDiagram(problems)
    env = env or {}
    net = _Net()
    denominator = 1

    fresh = iter(range(1 << 62))
    for vid in sorted(d.vertices):
        v = d.vertices[vid]
        ins = [("e", d.edge_at(in_port(vid, k)).id) for k in range(v.n_in)]
        outs = [("e", d.edge_at(out_port(vid, k)).id) for k in range(v.n_out)]
        if v.kind.tag == "param":
            a, b = _param_vector(env, v.kind.name)
            scale = math.lcm(a.denominator, b.denominator)
            pieces = [(outs, [int(a * scale), int(b * scale)])]
            denominator *= scale
        else:
            pieces = _spider_pieces(v.kind, ins, outs, fresh)
        # decorations of edges leaving this vertex are folded in here, and
        # those of edges arriving straight from a boundary input
        legs = [(lab, d.edge_at(out_port(vid, k)), False) for k, lab in enumerate(outs)]
        legs += [(lab, d.edge_at(in_port(vid, k)), True) for k, lab in enumerate(ins)]
        for lab, e, incoming in legs:
            if not (e.tick or e.cross) or (incoming and e.src.owner != BOUNDARY_IN):
                continue
            m = _wire_matrix(e.tick, e.cross)
            for idx, (labels, data) in enumerate(pieces):
                if lab in labels:
                    axis = labels.index(lab)
                    pieces[idx] = (labels, kernels.apply_matrix(data, len(labels), axis, _transpose(m) if incoming else m))
                    break
        for labels, data in pieces:
            net.add(labels, data)

    in_labels, out_labels = [], []
    for i in range(d.n_inputs):
        e = d.input_edge(i)
        if e.dst.owner == BOUNDARY_OUT:
            m = _wire_matrix(e.tick, e.cross)
            # wire tensor indexed (in, out): entry M[out][in]
            net.add([("a", e.id), ("b", e.id)], [m[0], m[2], m[1], m[3]])
            in_labels.append(("a", e.id))
        else:
            in_labels.append(("e", e.id))
    for j in range(d.n_outputs):
        e = d.output_edge(j)
        out_labels.append(("b", e.id) if e.src.owner == BOUNDARY_IN else ("e", e.id))

    if not net.tensors:
        net.add([], [1])
    net.contract_all()
    labels, data = net.tensors[0]
    order = in_labels + out_labels
    if labels != order:
        data = kernels.permute(data, len(labels), [labels.index(lab) for lab in order])
    return Tensor(d.n_inputs, d.n_outputs, tuple(Fraction(x, denominator) for x in data))


def scalar_value(d: Diagram, env: Optional[Environment] = None) -> Fraction:
    if not d.is_closed:
        raise NotClosed(f"diagram has signature {d.signature}, expected (0, 0)")
    return evaluate(d, env).entries[0]


def proj_equal(t1: Tensor, t2: Tensor) -> tuple[bool, Optional[Fraction]]:
    """Equality up to a nonzero scalar; returns the witness ``lam`` with t1 = lam * t2."""
    if t1.signature != t2.signature:
        raise ShapeMismatch(f"signatures {t1.signature} and {t2.signature} differ")
    lam = None
    for x, y in zip(t1.entries, t2.entries):
        if y == 0:
            if x != 0:
                return False, None
            continue
        if x == 0:
            return False, None
        r = x / y
        if lam is None:
            lam = r
        elif r != lam:
            return False, None
    return True, (Fraction(1) if lam is None else lam)
