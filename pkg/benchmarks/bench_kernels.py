"""Benchmark the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--trials N] [--scan-n N]

Times the three hot kernels on identical inputs, checks that both backends
return identical results, and reports the end-to-end Monte Carlo estimate
throughput. Build the extension first with ``python setup.py build_ext
--inplace`` (or an editable install); without it only the fallback runs.
"""

import argparse
import math
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from chainbell import _kernels_fallback

try:
    from chainbell import _kernels
except ImportError:
    _kernels = None


def timeit(fn, repeats=3):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def row(name, numpy_s, cython_s):
    speedup = f"{numpy_s / cython_s:6.1f}x" if cython_s else "   n/a"
    cy = f"{cython_s * 1e3:10.2f}" if cython_s else "       -  "
    print(f"{name:<28}{numpy_s * 1e3:10.2f}{cy}{speedup:>10}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=5_000_000,
                        help="samples for the outcome-mapping benchmarks")
    parser.add_argument("--scan-n", type=int, default=10,
                        help="chain order for the strategy-scan benchmark")
    args = parser.parse_args()

    if _kernels is None:
        print("compiled kernels not built; timing the numpy fallback only\n")

    rng = np.random.default_rng(0)
    n_pairs = 12
    probs = rng.dirichlet(np.ones(4), size=n_pairs)
    cum = np.ascontiguousarray(np.cumsum(probs[:, :3], axis=1))
    pair_idx = rng.integers(0, n_pairs, size=args.trials).astype(np.int64)
    u = rng.random(args.trials)

    print(f"{'kernel':<28}{'numpy ms':>10}{'cython ms':>10}{'speedup':>10}")

    t_np, out_np = timeit(lambda: _kernels_fallback.map_outcomes(cum, pair_idx, u))
    t_cy = None
    if _kernels:
        t_cy, out_cy = timeit(lambda: _kernels.map_outcomes(cum, pair_idx, u))
        assert np.array_equal(out_np, out_cy), "backend outputs differ"
    row(f"map_outcomes ({args.trials:.0e})", t_np, t_cy)

    t_np, c_np = timeit(lambda: _kernels_fallback.count_outcomes(pair_idx, out_np, n_pairs))
    t_cy = None
    if _kernels:
        t_cy, c_cy = timeit(lambda: _kernels.count_outcomes(pair_idx, out_np, n_pairs))
        assert np.array_equal(c_np, c_cy), "backend counts differ"
    row(f"count_outcomes ({args.trials:.0e})", t_np, t_cy)

    t_np, s_np = timeit(lambda: _kernels_fallback.lhv_scan(args.scan_n), repeats=1)
    t_cy = None
    if _kernels:
        t_cy, s_cy = timeit(lambda: _kernels.lhv_scan(args.scan_n), repeats=1)
        assert s_np == s_cy, "backend scans differ"
    row(f"lhv_scan (n={args.scan_n}, 4^n)", t_np, t_cy)

    # end to end: seeded estimate of the order-2 functional at theta = pi
    from chainbell.correlations import ChainConfig, QuantumModel
    from chainbell.simulate import estimate_i, simulate_paired_counts

    config = ChainConfig(2, math.pi)
    model = QuantumModel(1.0)

    def run_estimate():
        counts = simulate_paired_counts(model, config, trials=1_000_000, seed=5)
        return estimate_i(counts, config).value

    t_active, value = timeit(run_estimate)
    backend = "cython" if _kernels else "numpy"
    print(f"\nend-to-end 1e6-trial estimate ({backend} backend active): "
          f"{t_active * 1e3:.1f} ms, value {value:.7f} "
          f"(target {2 - math.sqrt(2):.7f})")


if __name__ == "__main__":
    main()
