"""Rational numbers as diagrams.

A natural ``n`` is ``n`` white units feeding one black spider, which
denotes ``n|0> + |1>``.  A fraction ``p/q`` is the white product of the
numerator and the ticked denominator, with one cross on the output when
``p < 0``.  Black multiplication adds, white multiplication multiplies,
the tick inverts and the cross negates; decoding reads ``a/b`` off the
state ``a|0> + b|1>``.
"""
from __future__ import annotations

import ast
import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from . import shapes
from .diagram import GHZ, W, Diagram, DiagramBuilder, compose_par, compose_seq, decorate_output
from .errors import ArityMismatch, DegenerateValue, ParseError, WrongSignature, ZeroDenominator
from .semantics import Environment, evaluate


@dataclass(frozen=True)
class ExtendedRational:
    """A rational, or ``inf`` (nonzero over zero), or ``undefined`` (0/0)."""

    kind: str  # "finite" | "infinity" | "undefined"
    value: Optional[Fraction] = None

    @classmethod
    def finite(cls, p, q=1) -> "ExtendedRational":
        return cls("finite", Fraction(p, q))

    @classmethod
    def from_pair(cls, a, b) -> "ExtendedRational":
        a, b = Fraction(a), Fraction(b)
        if b != 0:
            return cls("finite", a / b)
        return cls("infinity") if a != 0 else cls("undefined")

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def __str__(self):
        if self.kind == "finite":
            return str(self.value)
        return "inf" if self.kind == "infinity" else "undefined"

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.kind == "finite" and self.value == other
        if not isinstance(other, ExtendedRational):
            return NotImplemented
        return (self.kind, self.value) == (other.kind, other.value)

    def __hash__(self):
        return hash((self.kind, self.value))


INFINITY = ExtendedRational("infinity")
UNDEFINED = ExtendedRational("undefined")


class ArithOp(enum.Enum):
    ADD = "add"
    MUL = "mul"
    INV = "inv"
    NEG = "neg"

    @property
    def arity(self) -> int:
        return 2 if self in (ArithOp.ADD, ArithOp.MUL) else 1


def encode_nat(n: int) -> Diagram:
    if n < 0:
        raise ValueError(f"naturals are nonnegative, got {n}")
    b = DiagramBuilder(0, 1)
    m = b.w()
    for _ in range(n):
        b.wire(b.ghz(), m)
    b.wire(m, ("out", 0))
    return b.build()


def encode_rational(p: int, q: int = 1) -> Diagram:
    """White product of ``enc(|p|)`` and the ticked ``enc(q)``; a cross marks ``p < 0``."""
    if q == 0:
        raise ZeroDenominator(f"{p}/0 has no encoding")
    if q < 0:
        p, q = -p, -q
    num = encode_nat(abs(p))
    den = decorate_output(encode_nat(q), 0, tick=1)
    d = compose_seq(compose_par(num, den), shapes.mult(GHZ))
    if p < 0:
        d = decorate_output(d, 0, cross=1)
    return d


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        if "/" in text and text.split("/")[1].strip().lstrip("+-").strip("0") == "":
            raise ZeroDenominator(f"{text} has a zero denominator") from exc
        raise ParseError(f"not a fraction: {text!r}") from exc


def encode(value: Union[Fraction, int, str]) -> Diagram:
    """Encode a rational in lowest terms."""
    if isinstance(value, str):
        value = parse_fraction(value)
    value = Fraction(value)
    return encode_rational(value.numerator, value.denominator)


def decode(d: Diagram, env: Optional[Environment] = None) -> ExtendedRational:
    if d.signature != (0, 1):
        raise WrongSignature(f"decode needs a (0, 1) diagram, got {d.signature}")
    a, b = evaluate(d, env).entries
    return ExtendedRational.from_pair(a, b)


def apply_arith(op: ArithOp, args: Sequence[Diagram]) -> Diagram:
    op = ArithOp(op)
    if len(args) != op.arity:
        raise ArityMismatch(f"{op.value} takes {op.arity} argument(s), got {len(args)}")
    for d in args:
        if d.signature != (0, 1):
            raise WrongSignature(f"arguments must be (0, 1) diagrams, got {d.signature}")
    if op is ArithOp.ADD:
        return compose_seq(compose_par(*args), shapes.mult(W))
    if op is ArithOp.MUL:
        return compose_seq(compose_par(*args), shapes.mult(GHZ))
    if op is ArithOp.INV:
        return decorate_output(args[0], 0, tick=1)
    return decorate_output(args[0], 0, cross=1)


def add(a: Diagram, b: Diagram) -> Diagram:
    return apply_arith(ArithOp.ADD, [a, b])


def mul(a: Diagram, b: Diagram) -> Diagram:
    return apply_arith(ArithOp.MUL, [a, b])


def inv(a: Diagram) -> Diagram:
    return apply_arith(ArithOp.INV, [a])


def neg(a: Diagram) -> Diagram:
    return apply_arith(ArithOp.NEG, [a])


# ---------------------------------------------------------------- expressions


def _parse(expr: str) -> ast.AST:
    try:
        tree = ast.parse(expr.strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {expr!r}: {exc.msg}") from exc
    return tree.body


def _compile(node: ast.AST) -> tuple[Diagram, Fraction]:
    """Diagram and oracle value of an expression node."""
    if isinstance(node, ast.Constant) and type(node.value) is int:
        return encode_nat(node.value), Fraction(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        d, v = _compile(node.operand)
        return (neg(d), -v) if isinstance(node.op, ast.USub) else (d, v)
    if isinstance(node, ast.BinOp):
        da, va = _compile(node.left)
        db, vb = _compile(node.right)
        if isinstance(node.op, ast.Add):
            return add(da, db), va + vb
        if isinstance(node.op, ast.Sub):
            return add(da, neg(db)), va - vb
        if isinstance(node.op, ast.Mult):
            return mul(da, db), va * vb
        if isinstance(node.op, ast.Div):
            if vb == 0:
                raise DegenerateValue("division by zero")
            return mul(da, inv(db)), va / vb
    raise ParseError(f"unsupported syntax: {ast.dump(node)}")


def eval_expression(expr: str) -> tuple[Diagram, ExtendedRational, ExtendedRational]:
    """Compile ``expr`` to a diagram; return it with its decoded value and the direct value."""
    d, v = _compile(_parse(expr))
    return d, decode(d), ExtendedRational("finite", v)
