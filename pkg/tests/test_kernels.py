import random

import pytest
from hypothesis import given, settings, strategies as st

from ghzw import _kernels_py, kernels

ck = pytest.importorskip("ghzw._ckernels")

ints = st.integers(min_value=-50, max_value=50)


@st.composite
def tensor(draw, max_rank=6):
    r = draw(st.integers(min_value=1, max_value=max_rank))
    return r, draw(st.lists(ints, min_size=1 << r, max_size=1 << r))


@settings(max_examples=200, deadline=None)
@given(tensor(), tensor(), st.randoms(use_true_random=False))
def test_contract_parity(ta, tb, rnd):
    (ra, a), (rb, b) = ta, tb
    k = rnd.randint(0, min(ra, rb))
    pairs = list(zip(rnd.sample(range(ra), k), rnd.sample(range(rb), k)))
    assert list(ck.contract(a, ra, b, rb, pairs)) == _kernels_py.contract(a, ra, b, rb, pairs)


@settings(max_examples=200, deadline=None)
@given(tensor(), st.randoms(use_true_random=False))
def test_unary_kernels_parity(ta, rnd):
    r, a = ta
    perm = list(range(r))
    rnd.shuffle(perm)
    assert list(ck.permute(a, r, perm)) == _kernels_py.permute(a, r, perm)
    axis = rnd.randrange(r)
    m = [rnd.randint(-2, 2) for _ in range(4)]
    assert list(ck.apply_matrix(a, r, axis, m)) == _kernels_py.apply_matrix(a, r, axis, m)
    if r >= 2:
        x, y = rnd.sample(range(r), 2)
        assert list(ck.trace(a, r, x, y)) == _kernels_py.trace(a, r, x, y)


def test_overflow_falls_back_to_bignum():
    big = 1 << 62
    a = [big, big]
    b = [big, big]
    assert kernels.contract(a, 1, b, 1, [(0, 0)]) == [2 * big * big]


def test_backend_flag():
    assert kernels.BACKEND in ("cython", "python")
