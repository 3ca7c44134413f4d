# cython: language_level=3, boundscheck=False, wraparound=False, overflowcheck=True
"""Compiled twins of the kernels in ``_kernels_py``.

Arithmetic is done in int64 with overflow checking; any overflow raises
``OverflowError`` and the caller falls back to the arbitrary-precision
Python backend.
"""
from array import array


cdef long long[::1] _offsets(axes, int rank):
    cdef Py_ssize_t n = len(axes)
    cdef long long[::1] offs = array('q', [0]) * (1 << n)
    cdef Py_ssize_t size = 1, k, j
    cdef long long w
    for ax in axes:
        w = 1LL << (rank - 1 - <int>ax)
        # expand in place from the back so earlier axes stay most significant
        for j in range(size - 1, -1, -1):
            offs[2 * j + 1] = offs[j] + w
            offs[2 * j] = offs[j]
        size *= 2
    return offs


def contract(a, int ra, b, int rb, pairs):
    cdef long long[::1] av = array('q', a)
    cdef long long[::1] bv = array('q', b)
    con_a = [p[0] for p in pairs]
    con_b = [p[1] for p in pairs]
    free_a = [x for x in range(ra) if x not in con_a]
    free_b = [x for x in range(rb) if x not in con_b]
    cdef long long[::1] oa = _offsets(con_a, ra)
    cdef long long[::1] ob = _offsets(con_b, rb)
    cdef long long[::1] fa = _offsets(free_a, ra)
    cdef long long[::1] fb = _offsets(free_b, rb)
    cdef Py_ssize_t na = fa.shape[0], nb = fb.shape[0], nk = oa.shape[0]
    cdef long long[::1] out = array('q', [0]) * (na * nb)
    cdef Py_ssize_t x, y, t
    cdef long long acc, xa, yb
    for x in range(na):
        xa = fa[x]
        for y in range(nb):
            yb = fb[y]
            acc = 0
            for t in range(nk):
                acc += av[xa + oa[t]] * bv[yb + ob[t]]
            out[x * nb + y] = acc
    return list(out)


def trace(a, int ra, int ax1, int ax2):
    cdef long long[::1] av = array('q', a)
    free = [x for x in range(ra) if x != ax1 and x != ax2]
    cdef long long[::1] fo = _offsets(free, ra)
    cdef long long d = (1LL << (ra - 1 - ax1)) + (1LL << (ra - 1 - ax2))
    cdef Py_ssize_t n = fo.shape[0], x
    cdef long long[::1] out = array('q', [0]) * n
    for x in range(n):
        out[x] = av[fo[x]] + av[fo[x] + d]
    return list(out)


def apply_matrix(a, int ra, int axis, m):
    cdef long long[::1] av = array('q', a)
    cdef long long m00 = m[0], m01 = m[1], m10 = m[2], m11 = m[3]
    cdef long long w = 1LL << (ra - 1 - axis)
    cdef long long[::1] fo = _offsets([k for k in range(ra) if k != axis], ra)
    cdef long long[::1] out = array('q', a)
    cdef Py_ssize_t x, n = fo.shape[0]
    cdef long long lo, hi, base
    for x in range(n):
        base = fo[x]
        lo = av[base]
        hi = av[base + w]
        out[base] = m00 * lo + m01 * hi
        out[base + w] = m10 * lo + m11 * hi
    return list(out)


def permute(a, int ra, perm):
    cdef long long[::1] av = array('q', a)
    cdef long long[::1] fo = _offsets(list(perm), ra)
    cdef Py_ssize_t x, n = fo.shape[0]
    cdef long long[::1] out = array('q', [0]) * n
    for x in range(n):
        out[x] = av[fo[x]]
    return list(out)
