"""Compare the numba and numpy paths of the prime-field kernels.

Run: python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is called once per backend as warm-up (this also triggers the
numba compilation), outputs are checked for equality, then timed.
"""
import argparse
import time

import numpy as np

from segreproj import kernels
from segreproj._accel import HAVE_NUMBA
from segreproj.multipoly import monomials_of_degree
from segreproj.segre import p1_table

P = 65537


def _cases(rng):
    A = rng.integers(0, P, size=(120, 160))
    pts = rng.integers(0, P, size=(400, 6))
    exps = np.array(monomials_of_degree(6, 3), dtype=np.int64)
    table = p1_table(13)
    n = 4
    forms_a = rng.integers(0, 13, size=(3, 2**n))
    forms_b = rng.integers(0, 13, size=(2, 2**n))
    return {
        "rref 120x160": lambda b: kernels.rref_modp(A, P, backend=b),
        "monomials 400 pts, 84 cubics": lambda b: kernels.monomial_matrix_modp(pts, exps, P, backend=b),
        "product masks (P^1(F_13))^4": lambda b: kernels.product_zero_masks(table, n, forms_a, forms_b, 13, backend=b),
    }


def _same(x, y):
    if isinstance(x, tuple):
        return all(_same(a, b) for a, b in zip(x, y))
    return np.array_equal(x, y)


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    cases = _cases(np.random.default_rng(args.seed))
    print(f"{'kernel':32s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in cases.items():
        outs = {b: fn(b) for b in backends}
        if len(backends) == 2 and not _same(outs["numpy"], outs["numba"]):
            raise SystemExit(f"{name}: backends disagree")
        times = {b: _time(lambda: fn(b), args.repeat) for b in backends}
        row = f"{name:32s}" + "".join(f"{times[b] * 1e3:10.2f}ms" for b in backends)
        if len(backends) == 2:
            row += f"{times['numpy'] / times['numba']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
