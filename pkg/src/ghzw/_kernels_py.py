"""Pure-Python tensor kernels over exact integers.

Tensors are flat lists of ints of length ``2**rank``; axis 0 is the most
significant bit of the flat index.  These functions are the reference
backend; ``_ckernels`` implements the same signatures in Cython.
"""
from operator import mul


def offsets(axes, rank):
    """Flat offsets of every bit assignment to ``axes`` (first axis most significant)."""
    offs = [0]
    for ax in axes:
        w = 1 << (rank - 1 - ax)
        offs = [o + bit * w for o in offs for bit in (0, 1)]
    return offs


def contract(a, ra, b, rb, pairs):
    """Sum over the paired axes; free axes of ``a`` come first, then those of ``b``."""
    con_a = [p[0] for p in pairs]
    con_b = [p[1] for p in pairs]
    free_a = [x for x in range(ra) if x not in con_a]
    free_b = [x for x in range(rb) if x not in con_b]
    oa, ob = offsets(con_a, ra), offsets(con_b, rb)
    rows = [[a[x + s] for s in oa] for x in offsets(free_a, ra)]
    cols = [[b[y + t] for t in ob] for y in offsets(free_b, rb)]
    return [sum(map(mul, row, col)) for row in rows for col in cols]


def trace(a, ra, ax1, ax2):
    free = [x for x in range(ra) if x not in (ax1, ax2)]
    diag = (0, (1 << (ra - 1 - ax1)) + (1 << (ra - 1 - ax2)))
    return [a[x] + a[x + diag[1]] for x in offsets(free, ra)]


def apply_matrix(a, ra, axis, m):
    """``new[.., i, ..] = sum_j m[i][j] * a[.., j, ..]`` with ``m`` flat row-major."""
    m00, m01, m10, m11 = m
    w = 1 << (ra - 1 - axis)
    out = list(a)
    for x in offsets([k for k in range(ra) if k != axis], ra):
        lo, hi = a[x], a[x + w]
        out[x] = m00 * lo + m01 * hi
        out[x + w] = m10 * lo + m11 * hi
    return out


def permute(a, ra, perm):
    """Axis ``k`` of the result is axis ``perm[k]`` of ``a``."""
    return [a[o] for o in offsets(perm, ra)]
