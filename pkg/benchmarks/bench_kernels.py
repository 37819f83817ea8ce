"""Benchmark the compiled kernel extension against the numpy fallback.

Runs each hot kernel on representative workload sizes with both backends and
prints a table of per-call times and speedups. The two backends are imported
directly (bypassing the SYMPLAN_PURE_PYTHON switch) so one process can time
both.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from symplan.kernels import _ckernels, _npkernels


def _time(fn, repeats):
    # warm-up, then best-of-N wall time
    fn()
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _workloads(rng):
    X = rng.normal(size=(500, 8))
    Y = rng.normal(size=(800, 8))
    big = rng.normal(size=(2000, 4))
    bw = np.abs(rng.normal(size=8)) + 0.1
    return [
        ("pairwise_sqdist 500x800x8", lambda m: m.pairwise_sqdist(X, Y)),
        ("pairwise_sqdist 2000x2000x4", lambda m: m.pairwise_sqdist(big, big)),
        ("kth_neighbor_dist k=1", lambda m: m.kth_neighbor_dist(X, Y, 1)),
        ("kth_neighbor_dist k=5", lambda m: m.kth_neighbor_dist(big, big, 5, exclude_self=True)),
        ("radius_neighbor_lists", lambda m: m.radius_neighbor_lists(big, 0.5)),
        ("gauss_kde_logpdf 500q x 800s", lambda m: m.gauss_kde_logpdf(X, Y, bw)),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)

    print(f"{'kernel':<32} {'numpy':>10} {'cython':>10} {'speedup':>8}")
    for name, call in _workloads(rng):
        t_np = _time(lambda: call(_npkernels), args.repeats)
        t_cy = _time(lambda: call(_ckernels), args.repeats)
        print(f"{name:<32} {t_np * 1e3:>8.2f}ms {t_cy * 1e3:>8.2f}ms {t_np / t_cy:>7.2f}x")


if __name__ == "__main__":
    main()
