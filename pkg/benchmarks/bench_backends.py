#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times one right-hand-side evaluation (original and regularized) and a short
production-style run for each backend, then prints the speedups.  Usage:

    python benchmarks/bench_backends.py [--dim D] [--n N] [--quick]
"""

import argparse
import time

import numpy as np

from dragflow import kernels
from dragflow.diagnostics import DiagnosticsSuite
from dragflow.generators import raw_to_state, sine_perturbation
from dragflow.grid import PeriodicGrid
from dragflow.integrators import StepConfig, run
from dragflow.model import ModelParams


def time_rhs(backend, dim, n, eps, reps):
    shape3 = (n,) * dim + (1,) * (3 - dim)
    rng = np.random.default_rng(0)
    nn = 1.0 + 0.1 * rng.random(shape3)
    rho = 1.0 + 0.1 * rng.random(shape3)
    v = 0.1 * rng.normal(size=(dim,) + shape3)
    u = 0.1 * rng.normal(size=(dim,) + shape3)
    args = (nn, v, rho, u, 1.0 / n, dim, 1.0, 0.1, 0.1, 0.0, 1.0, 2.0, 7.0,
            eps, 0.0, True)
    backend.rhs(*args)  # warm (jit compile / cache load)
    t0 = time.perf_counter()
    for _ in range(reps):
        backend.rhs(*args)
    return (time.perf_counter() - t0) / reps


def time_run(backend_name, dim, n, t_end):
    kernels.use_backend(backend_name)
    grid = PeriodicGrid(dim, n)
    p = ModelParams(kappa=1.0, eta=0.1, mu=0.1, lam=0.0)
    s0 = raw_to_state(sine_perturbation(grid, 0.1, 1))
    suite = DiagnosticsSuite.from_initial_state(s0, p, track_aux=False)
    cfg = StepConfig(t_end=t_end, sample_every=t_end)
    t0 = time.perf_counter()
    res = run(s0, p, cfg, suite)
    wall = time.perf_counter() - t0
    assert res.status == "completed"
    return wall, res.n_steps


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dim", type=int, default=1)
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()

    reps = 200 if args.quick else 2000
    t_end = 0.1 if args.quick else 1.0

    rows = []
    for name in ("numpy", "numba"):
        try:
            backend = kernels.use_backend(name)
        except ImportError:
            print(f"{name}: not available, skipping")
            continue
        t_orig = time_rhs(backend, args.dim, args.n, 0.0, reps)
        t_reg = time_rhs(backend, args.dim, args.n, 0.05, reps)
        wall, steps = time_run(name, args.dim, args.n, t_end)
        rows.append((name, t_orig, t_reg, wall, steps))

    print(f"\ndim={args.dim} N={args.n}  (rhs averaged over {reps} evals)")
    print(f"{'backend':>8} {'rhs':>12} {'rhs+reg':>12} {'run wall':>10} {'steps/s':>10}")
    for name, t_orig, t_reg, wall, steps in rows:
        print(f"{name:>8} {t_orig * 1e6:>10.1f}us {t_reg * 1e6:>10.1f}us "
              f"{wall:>9.2f}s {steps / wall:>10.0f}")
    if len(rows) == 2:
        print(f"\nspeedup numba/numpy: rhs {rows[0][1] / rows[1][1]:.1f}x, "
              f"regularized {rows[0][2] / rows[1][2]:.1f}x, "
              f"run {rows[0][3] / rows[1][3]:.1f}x")


if __name__ == "__main__":
    main()
