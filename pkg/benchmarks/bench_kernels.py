"""Compare the compiled and numpy kernels on STOMP and mSTOMP.

Usage::

    python3 benchmarks/bench_kernels.py [--n 4096] [--m 64] [--d 3] [--repeats 3]
"""

import argparse
import time

import numpy as np

from matprof._backend import BACKEND
from matprof.multi import mstamp
from matprof.profile import stomp


def best_of(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--m", type=int, default=64)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args(argv)
    if BACKEND != "cython":
        raise SystemExit("compiled kernels are not built; run `pip install -e .` first")

    rng = np.random.default_rng(0)
    T = np.cumsum(rng.standard_normal(args.n))
    Td = np.cumsum(rng.standard_normal((args.d, args.n // 4)), axis=1)
    cases = [
        (f"stomp  n={args.n} m={args.m}", lambda b: stomp(T, args.m, backend=b)),
        (f"mstomp d={args.d} n={args.n // 4} m={args.m}",
         lambda b: mstamp(Td, args.m, backend=b)),
    ]
    print(f"{'case':<32} {'cython s':>10} {'python s':>10} {'speedup':>8} {'max|dP|':>9}")
    for name, run in cases:
        tc, a = best_of(lambda: run("cython"), args.repeats)
        tp, b = best_of(lambda: run("python"), args.repeats)
        diff = float(np.nanmax(np.abs(np.where(np.isinf(a.P), 0, a.P - b.P))))
        print(f"{name:<32} {tc:>10.3f} {tp:>10.3f} {tp / tc:>7.1f}x {diff:>9.1e}")


if __name__ == "__main__":
    main()
