"""Backend selection for the integer tensor kernels.

The Cython extension is used when it was built and importable, unless
``GHZW_PURE_PYTHON`` is set in the environment.  Results are identical:
the compiled path works in int64 and any overflow falls through to the
arbitrary-precision Python implementation for that call.
"""
import os

from . import _kernels_py

_fast = None
if not os.environ.get("GHZW_PURE_PYTHON"):
    try:
        from . import _ckernels as _fast
    except ImportError:  # extension not built
        _fast = None

BACKEND = "cython" if _fast is not None else "python"


def _dispatch(name):
    slow = getattr(_kernels_py, name)
    if _fast is None:
        return slow
    fast = getattr(_fast, name)

    def call(*args):
        try:
            return fast(*args)
        except OverflowError:
            return slow(*args)

    call.__name__ = name
    call.__doc__ = slow.__doc__
    return call


contract = _dispatch("contract")
trace = _dispatch("trace")
apply_matrix = _dispatch("apply_matrix")
permute = _dispatch("permute")
