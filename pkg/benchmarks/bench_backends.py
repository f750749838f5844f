#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the two hot paths, the Jacobi eigensolver and the cheating-objective
grid scan, on the active backend, then re-runs itself in a subprocess with
``ROTLAB_DISABLE_NUMBA=1`` so both backends appear in one invocation.

Usage: python benchmarks/bench_backends.py [--grid 200] [--repeats 5]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from rotlab import _kernels


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def run_benchmarks(grid_points, repeats):
    rng = np.random.default_rng(7)
    rows = []

    for dim in (3, 9, 16):
        raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        hermitian = (raw + raw.conj().T) / 2.0
        _kernels.eigvalsh(hermitian)  # warm-up / compile
        elapsed = time_call(lambda h=hermitian: _kernels.eigvalsh(h), repeats)
        rows.append((f"jacobi eigvalsh {dim}x{dim}", elapsed))

    angles = np.linspace(0.0, np.pi / 2.0, grid_points)
    _kernels.qutrit_cheat_grid(angles[:4], angles[:4])  # warm-up / compile
    elapsed = time_call(lambda: _kernels.qutrit_cheat_grid(angles, angles), repeats)
    rows.append((f"objective grid {grid_points}x{grid_points}", elapsed))
    return rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid", type=int, default=200, help="grid points per axis")
    parser.add_argument("--repeats", type=int, default=5, help="timing repeats (best-of)")
    parser.add_argument(
        "--no-subprocess",
        action="store_true",
        help="only benchmark the active backend",
    )
    args = parser.parse_args(argv)

    print(f"backend: {_kernels.BACKEND}")
    for name, elapsed in run_benchmarks(args.grid, args.repeats):
        print(f"  {name:<28} {elapsed * 1e3:10.3f} ms")

    if _kernels.USE_NUMBA and not args.no_subprocess:
        print()
        sys.stdout.flush()  # keep parent output ahead of the child's
        env = dict(os.environ, ROTLAB_DISABLE_NUMBA="1")
        subprocess.run(
            [
                sys.executable,
                os.path.abspath(__file__),
                "--grid",
                str(args.grid),
                "--repeats",
                str(args.repeats),
                "--no-subprocess",
            ],
            env=env,
            check=True,
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
