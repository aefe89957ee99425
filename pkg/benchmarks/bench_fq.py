"""Compare the compiled GF(q) kernels against the numpy fallback.

Usage: python benchmarks/bench_fq.py [q] [size]
"""

import sys
import time

import numpy as np

from invtool import fq, fqfallback
from invtool.numbers import FiniteField


def bench(kernel, name, tables, M, A, B, repeats=3):
    best_rref = min(
        _timed(lambda: kernel.rref_inplace(M.copy(), tables.add, tables.mul,
                                           tables.neg, tables.inv))
        for _ in range(repeats))
    best_mm = min(
        _timed(lambda: kernel.matmul(A, B, tables.add, tables.mul))
        for _ in range(repeats))
    print(f"{name:>10}: rref {best_rref * 1e3:8.1f} ms   "
          f"matmul {best_mm * 1e3:8.1f} ms")
    return best_rref, best_mm


def _timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def main():
    q = int(sys.argv[1]) if len(sys.argv) > 1 else 9
    n = int(sys.argv[2]) if len(sys.argv) > 2 else 400
    if q == 9:
        field = FiniteField(3, 2)
    elif q == 3:
        field = FiniteField(3)
    else:
        p, k = q, 1
        for cand in (2, 3, 5, 7):
            kk = 0
            m = q
            while m % cand == 0 and m > 1:
                m //= cand
                kk += 1
            if m == 1:
                p, k = cand, kk
                break
        field = FiniteField(p, k)
    tables = fq.tables_for(field)
    rng = np.random.default_rng(7)
    M = rng.integers(0, q, size=(n, n + n // 2), dtype=np.uint16)
    A = np.ascontiguousarray(rng.integers(0, q, size=(n, n), dtype=np.uint16))
    B = np.ascontiguousarray(rng.integers(0, q, size=(n, n), dtype=np.uint16))
    print(f"GF({q}), rref {M.shape[0]}x{M.shape[1]}, matmul {n}x{n}")
    fb = bench(fqfallback, "fallback", tables, M, A, B)
    if fq.backend_name() == "cython":
        cy = bench(fq.core, "cython", tables, M, A, B)
        print(f"{'speedup':>10}: rref {fb[0] / cy[0]:7.2f}x   "
              f"matmul {fb[1] / cy[1]:7.2f}x")
    else:
        print("compiled core not available; fallback only")


if __name__ == "__main__":
    main()
