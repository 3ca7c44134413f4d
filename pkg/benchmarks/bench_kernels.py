"""Compare the compiled and pure-Python tensor kernels.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Part one times each kernel directly on random integer tensors.  Part two
times ``evaluate`` end to end in a subprocess per backend, with
``GHZW_PURE_PYTHON`` selecting the fallback.
"""
import argparse
import os
import random
import subprocess
import sys
import timeit

from ghzw import _kernels_py

try:
    from ghzw import _ckernels
except ImportError:
    _ckernels = None

EVAL_SNIPPET = """
import random, time
from ghzw import BACKEND, evaluate
from ghzw.fuzz import random_diagram
rng = random.Random(7)
ds = [random_diagram(rng, max_vertices=10, max_legs=3, max_boundary=3) for _ in range(300)]
t0 = time.perf_counter()
for d in ds:
    evaluate(d)
print(BACKEND, time.perf_counter() - t0)
"""


def kernel_cases(rng):
    a = [rng.randint(-5, 5) for _ in range(1 << 10)]
    b = [rng.randint(-5, 5) for _ in range(1 << 8)]
    return {
        "contract r10.r8 over 3": ("contract", (a, 10, b, 8, [(1, 0), (4, 3), (9, 7)])),
        "trace r10": ("trace", (a, 10, 2, 7)),
        "apply_matrix r10": ("apply_matrix", (a, 10, 5, [0, 1, 1, 0])),
        "permute r10": ("permute", (a, 10, [9, 3, 1, 0, 8, 2, 4, 7, 6, 5])),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    rng = random.Random(0)

    print(f"{'kernel':28} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for label, (name, call_args) in kernel_cases(rng).items():
        slow = getattr(_kernels_py, name)
        t_py = timeit.timeit(lambda: slow(*call_args), number=args.repeat) / args.repeat * 1e3
        if _ckernels is None:
            print(f"{label:28} {t_py:10.3f} {'n/a':>10}")
            continue
        fast = getattr(_ckernels, name)
        assert list(fast(*call_args)) == list(slow(*call_args)), label
        t_cy = timeit.timeit(lambda: fast(*call_args), number=args.repeat) / args.repeat * 1e3
        print(f"{label:28} {t_py:10.3f} {t_cy:10.3f} {t_py / t_cy:7.1f}x")

    print()
    print("evaluate() on 300 fuzzed diagrams:")
    for pure in (False, True):
        env = dict(os.environ)
        env.pop("GHZW_PURE_PYTHON", None)
        if pure:
            env["GHZW_PURE_PYTHON"] = "1"
        out = subprocess.run([sys.executable, "-c", EVAL_SNIPPET], env=env, capture_output=True, text=True, check=True)
        backend, secs = out.stdout.split()
        print(f"  {backend:8} {float(secs):.3f} s")


if __name__ == "__main__":
    main()
