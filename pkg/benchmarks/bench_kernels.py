"""Compare the compiled and numpy kernel backends on the two hot loops.

    python3 benchmarks/bench_kernels.py [--samples N] [--repeat R]

Reports best-of-R wall time per backend and the largest relative difference between their outputs.
"""
import argparse
import time

import numpy as np

from bekktail.fixtures import single_entry_order2, symmetric_pair
from bekktail.kernels import compiled_available
from bekktail.simulate import SimConfig, simulate_ensemble
from bekktail.stationarity import lyapunov_estimate


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--horizon", type=int, default=2000)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    if not compiled_available():
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")

    cases = [
        ("simulate  2x2 q=1", lambda b: simulate_ensemble(
            symmetric_pair(), SimConfig(n_samples=args.samples, replicas=100, thinning=5), backend=b).samples),
        ("simulate  2x2 q=2", lambda b: simulate_ensemble(
            single_entry_order2(), SimConfig(n_samples=args.samples, replicas=100, thinning=5), backend=b).samples),
        ("lyapunov  2x2 q=1", lambda b: lyapunov_estimate(
            symmetric_pair(), n_horizon=args.horizon, replicas=200, backend=b).gamma_hat),
        ("lyapunov  2x2 q=2", lambda b: lyapunov_estimate(
            single_entry_order2(), n_horizon=args.horizon, replicas=200, backend=b).gamma_hat),
    ]
    print(f"{'case':<20}{'cython s':>10}{'python s':>10}{'speedup':>9}  max rel diff")
    for name, fn in cases:
        tc, xc = best_of(lambda: fn("cython"), args.repeat)
        tp, xp = best_of(lambda: fn("python"), args.repeat)
        xc, xp = np.asarray(xc), np.asarray(xp)
        diff = float(np.max(np.abs(xc - xp) / np.maximum(1.0, np.abs(xp))))
        print(f"{name:<20}{tc:>10.3f}{tp:>10.3f}{tp / tc:>8.1f}x  {diff:.2e}")


if __name__ == "__main__":
    main()
