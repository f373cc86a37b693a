"""Timing of the compiled kernels against the numpy fallback.

Run with ``python benchmarks/bench_kernels.py [--repeat N] [--seed S]``. Each
kernel is run on identical inputs under every available backend; the table
reports the best wall time and the largest relative difference between
backends.
"""
import argparse
import timeit

import numpy as np

from bcmap import kernels
from bcmap.families import random_zeros


def _cases(rng):
    zeros = random_zeros(rng, 30)
    z = random_zeros(rng, 20000, 0.99)
    curve = 0.6 * np.exp(2j * np.pi * np.arange(4096) / 4096) * (1 + 0.2 * np.cos(5 * np.linspace(0, 2 * np.pi, 4096)))
    q = random_zeros(rng, 512, 0.9)
    w = random_zeros(rng, 1500, 0.999)
    om2 = (1 - np.abs(w)) * (1 + np.abs(w))
    return {
        "blaschke_eval (30 zeros x 2e4 points)": lambda b: kernels.blaschke_eval(zeros, z, backend=b)[2],
        "winding_numbers (4096-gon x 512 targets)": lambda b: kernels.winding_numbers(curve, q, backend=b)[0],
        "pairwise_min_omrho2 (1500 points)": lambda b: kernels.pairwise_min_omrho2(w, om2, backend=b),
        "pairwise_max_rho2 (1500 points)": lambda b: kernels.pairwise_max_rho2(w, backend=b),
    }


def _reldiff(a, b):
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    scale = np.maximum(np.abs(a), np.abs(b))
    scale = np.where(scale == 0, 1.0, scale)
    return float(np.max(np.abs(a - b) / scale))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    backends = sorted(kernels.BACKENDS)
    if "compiled" not in backends:
        print("compiled extension not built; timing the fallback only")
    cases = _cases(np.random.default_rng(args.seed))
    head = f"{'kernel':44s}" + "".join(f"{b:>12s}" for b in backends) + f"{'speedup':>10s}{'max rel diff':>14s}"
    print(head)
    print("-" * len(head))
    for name, fn in cases.items():
        times, outs = {}, {}
        for b in backends:
            outs[b] = fn(b)
            times[b] = min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat))
        row = f"{name:44s}" + "".join(f"{times[b] * 1e3:10.2f}ms" for b in backends)
        if len(backends) > 1:
            row += f"{times['python'] / times['compiled']:9.1f}x{_reldiff(outs['python'], outs['compiled']):14.1e}"
        print(row)


if __name__ == "__main__":
    main()
