"""Timing comparison of the compiled kernels against the numpy fallback.

Runs the two hot loops — the dense exact subset sweep and the permutation
marginal walk — at a few sizes and prints a table of per-backend timings.

Usage: python3 benchmarks/benchmark_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from shapbn import _kernels_py
from shapbn.engine import _weight_array
from shapbn.kernels import popcount_table

try:
    from shapbn import _kernels
except ImportError:
    _kernels = None


def best_of(repeats, fn, *args):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def bench_exact(impl, table, n, repeats):
    weights = _weight_array(n)
    pc = popcount_table(n)
    return best_of(repeats, impl.exact_shapley_from_table, table, weights, pc, n)


def bench_perms(impl, table, perms, n, repeats):
    return best_of(repeats, impl.permutation_marginals, table, perms, n)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if _kernels is None:
        print("compiled extension not built; showing the numpy fallback only\n")
    backends = [("python", _kernels_py)] + (
        [("cython", _kernels)] if _kernels is not None else []
    )

    rng = np.random.default_rng(0)
    rows = []
    for n in (14, 16, 18, 20):
        table = np.ascontiguousarray(rng.normal(size=1 << n))
        timings = {}
        values = {}
        for name, impl in backends:
            t, phi = bench_exact(impl, table, n, args.repeats)
            timings[name] = t
            values[name] = np.asarray(phi)
        if len(values) == 2:
            assert np.allclose(values["python"], values["cython"], atol=1e-10)
        rows.append((f"exact sweep n={n}", timings))
    for n, samples in ((8, 200_000), (12, 200_000)):
        table = np.ascontiguousarray(rng.normal(size=1 << n))
        perms = np.ascontiguousarray(
            rng.permuted(np.tile(np.arange(n, dtype=np.int64), (samples, 1)), axis=1)
        )
        timings = {}
        for name, impl in backends:
            t, _ = bench_perms(impl, table, perms, n, args.repeats)
            timings[name] = t
        rows.append((f"perm walk n={n}, {samples//1000}k perms", timings))

    names = [name for name, _ in backends]
    header = f"{'workload':<32}" + "".join(f"{name:>12}" for name in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, timings in rows:
        line = f"{label:<32}" + "".join(f"{timings[n] * 1e3:>10.1f}ms" for n in names)
        if len(names) == 2:
            line += f"{timings['python'] / timings['cython']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
