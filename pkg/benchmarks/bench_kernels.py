"""Benchmark: compiled kernels vs the pure numpy/Python fallback.

Run with: python benchmarks/bench_kernels.py
"""

import time

import numpy as np

import payoffdesign as pd
import payoffdesign._kernels.pure as pure

try:
    import payoffdesign._kernels._speedups as speedups
except ImportError:
    speedups = None


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    grid = pd.make_grid(0.2, 5.0, 2001, "log")
    market = pd.density_from_params("lognormal", {"mu": 0.0, "sigma": 0.20}, grid)
    believed = pd.density_from_params("lognormal", {"mu": 0.05, "sigma": 0.15}, grid)
    s_sorted = np.sort(np.log(believed.values / market.values))
    risk = lambda F: 1.0 + F  # noqa: E731

    small = pd.make_grid(0.2, 5.0, 257, "log")
    m_small = pd.density_from_params("lognormal", {"mu": 0.0, "sigma": 0.20}, small)
    b_small = pd.density_from_params("lognormal", {"mu": 0.05, "sigma": 0.15}, small)
    bw = small.weights * b_small.values
    mw = small.weights * m_small.values
    bond = np.ones(small.n)

    cases = [
        ("elasticity_profile n=2001 (R(F)=1+F)", lambda be: be.elasticity_profile(s_sorted, 0.0, risk)),
        ("ascent_crra n=257 R=2", lambda be: be.ascent_crra(bond, bw, mw, 2.0)),
        ("ascent_crra n=257 R=5", lambda be: be.ascent_crra(bond, bw, mw, 5.0)),
    ]

    print(f"{'kernel':40s} {'pure':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, call in cases:
        t_pure = best_of(lambda: call(pure))
        if speedups is None:
            print(f"{name:40s} {t_pure * 1e3:9.2f}ms {'n/a':>10s} {'n/a':>8s}")
            continue
        t_fast = best_of(lambda: call(speedups))
        print(f"{name:40s} {t_pure * 1e3:9.2f}ms {t_fast * 1e3:8.2f}ms {t_pure / t_fast:7.1f}x")

    if speedups is not None:
        check = np.max(
            np.abs(
                speedups.elasticity_profile(s_sorted, 0.0, risk)
                - pure.elasticity_profile(s_sorted, 0.0, risk)
            )
        )
        print(f"\nbackend agreement (elasticity profile sup-norm): {check:.3e}")


if __name__ == "__main__":
    main()
