"""
Benchmark script timing the commodeq solvers.

Run with: python benchmark/benchmark.py
"""

import timeit

SETUP = """
from commodeq import LevyModel, MarketParams, solve, brownian_closed_form
params = MarketParams(mu=200.0, m=1.0, pi0=100.0, pi_t=100.0,
                      eps=0.05, rate=0.01, gamma_p=0.04, gamma_s=0.004)
brownian = LevyModel.brownian(0.2, 10.0, 0.0, 0.3, 0.25)
jumps = LevyModel.jump_diffusion(0.2, 10.0, 0.0, 0.06, 0.0, 0.05, -8.0, 2.0, 0.25)
"""


def benchmark_brownian():
    """Compare the bracketing solver with the joint closed form."""

    print("=== Brownian equilibrium ===")

    n = 200
    t_solve = timeit.timeit("solve(params, brownian)", setup=SETUP, number=n)
    print(f"  solve:                {t_solve / n * 1e3:.3f} ms")
    t_closed = timeit.timeit("brownian_closed_form(params, brownian)", setup=SETUP, number=n)
    print(f"  brownian_closed_form: {t_closed / n * 1e3:.3f} ms")


def benchmark_jump_diffusion():
    """Time the jump solvers, dominated by the investor's inner root searches."""

    print("\n=== Jump-diffusion equilibrium ===")

    n = 5
    t_solve = timeit.timeit("solve(params, jumps)", setup=SETUP, number=n)
    print(f"  solve:                {t_solve / n * 1e3:.1f} ms")


def benchmark_monte_carlo():
    """Time Monte-Carlo certainty equivalents at the default sample size."""

    print("\n=== Monte-Carlo oracle ===")

    setup = SETUP + """
from commodeq.oracle import McConfig, producer_mc_utility
cfg = McConfig(n_samples=1_000_000, seed=7)
"""
    n = 3
    stmt = "producer_mc_utility(params, jumps, 20.0, -110.0, 65.0, cfg)"
    t_mc = timeit.timeit(stmt, setup=setup, number=n)
    print(f"  1e6 samples:          {t_mc / n:.3f} sec")


def run_all_benchmarks():
    """Run all benchmarks."""

    print("commodeq Performance Benchmarks")
    print("=" * 50)
    print("Note: timings depend on NumPy/SciPy builds and hardware.")
    print("      Run multiple times for stable results.")
    print()

    benchmark_brownian()
    benchmark_jump_diffusion()
    benchmark_monte_carlo()

    print("\n" + "=" * 50)
    print("Benchmarking complete!")


if __name__ == "__main__":
    run_all_benchmarks()
