"""Time the numba kernels against their pure-numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Compilation happens in a warm-up call and is reported separately.
"""

import argparse
import sys
import time
import timeit

import numpy as np

from drsubmax import _kernels


def _simplex_case(rng, m=20, n=30):
    A = rng.random((m, n))
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = 1.0
    T[m, :n] = rng.standard_normal(n)
    basis = n + np.arange(m)
    return lambda f: f(T.copy(), basis.copy(), 1e-11, 10_000)


def _dykstra_case(rng, m=10, n=20):
    A = rng.uniform(0.01, 1.01, (m, n))
    b = np.ones(m)
    ubar = (b[:, None] / A).min(axis=0)
    y = rng.standard_normal(n) * 3
    return lambda f: f(y.copy(), A, b, ubar, 1e-8, 10_000)


def _multilinear_case(rng, n=14):
    table = rng.standard_normal(1 << n)
    x = rng.random(n)
    return lambda f: f(table, x)


CASES = {
    "bland_simplex (20x30)": (_simplex_case, "bland_simplex"),
    "dykstra (10x20)": (_dykstra_case, "dykstra"),
    "multilinear (n=14)": (_multilinear_case, "multilinear"),
}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--number", type=int, default=20)
    args = p.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba unavailable or disabled; nothing to compare", file=sys.stderr)
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':<24}{'compile s':>10}{'numba ms':>11}{'numpy ms':>11}{'speedup':>9}")
    for label, (make, name) in CASES.items():
        call = make(rng)
        jit = getattr(_kernels, f"{name}_jit")
        ref = getattr(_kernels, f"{name}_numpy")
        t0 = time.perf_counter()
        call(jit)
        compile_s = time.perf_counter() - t0
        tj = min(timeit.repeat(lambda: call(jit), number=args.number, repeat=args.repeat)) / args.number
        tn = min(timeit.repeat(lambda: call(ref), number=args.number, repeat=args.repeat)) / args.number
        print(f"{label:<24}{compile_s:>10.2f}{tj * 1e3:>11.3f}{tn * 1e3:>11.3f}{tn / tj:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
