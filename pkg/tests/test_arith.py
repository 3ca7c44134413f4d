from fractions import Fraction

import pytest

from ghzw import evaluate, shapes
from ghzw.arith import (
    INFINITY,
    UNDEFINED,
    ArithOp,
    ExtendedRational,
    add,
    apply_arith,
    decode,
    encode,
    encode_nat,
    encode_rational,
    eval_expression,
    inv,
    mul,
    neg,
    parse_fraction,
)
from ghzw.errors import ArityMismatch, DegenerateValue, ParseError, WrongSignature, ZeroDenominator


def test_encode_nat_model():
    assert evaluate(encode_nat(0)).entries == (0, 1)
    assert evaluate(encode_nat(7)).entries == (7, 1)


@pytest.mark.parametrize("p,q", [(1, 2), (-3, 4), (0, 5), (6, 1), (5, -2)])
def test_encode_rational_decodes(p, q):
    assert decode(encode_rational(p, q)) == Fraction(p, q)


def test_zero_denominator():
    with pytest.raises(ZeroDenominator):
        encode_rational(1, 0)
    with pytest.raises(ZeroDenominator):
        parse_fraction("3/0")
    with pytest.raises(ParseError):
        parse_fraction("three")


def test_operations():
    a, b = encode("1/2"), encode("-2/3")
    assert decode(add(a, b)) == Fraction(-1, 6)
    assert decode(mul(a, b)) == Fraction(-1, 3)
    assert decode(inv(b)) == Fraction(-3, 2)
    assert decode(neg(a)) == Fraction(-1, 2)


def test_extended_values():
    assert decode(inv(encode(0))) == INFINITY
    assert ExtendedRational.from_pair(0, 0) == UNDEFINED
    assert str(INFINITY) == "inf" and str(UNDEFINED) == "undefined"


def test_signature_and_arity_errors():
    with pytest.raises(WrongSignature):
        decode(shapes.wire())
    with pytest.raises(ArityMismatch):
        apply_arith(ArithOp.ADD, [encode(1)])


def test_eval_expression():
    _, got, want = eval_expression("1/2 + 1/3")
    assert got == want == Fraction(5, 6)
    _, got, want = eval_expression("(2 - 5) * 3 / 4")
    assert got == want == Fraction(-9, 4)
    with pytest.raises(DegenerateValue):
        eval_expression("1/(2-2)")
    with pytest.raises(ParseError):
        eval_expression("2 ** 3")
