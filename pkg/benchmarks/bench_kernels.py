"""Time the compiled kernels against the fallback on the two hot paths.

    python benchmarks/bench_kernels.py [--n 20000] [--repeat 3]

Both backends are run on the same input and their outputs are compared before
any timing is reported.
"""

import argparse
import time

import numpy as np

from bellscan import _backend
from bellscan.scan import DEFAULT_THRESHOLDS, inclusive_range
from bellscan.synth import SynthConfig, generate_batch, kernel_arguments


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=20_000, help="synthetic events")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = _backend.available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the fallback is available")

    config = SynthConfig(n_attempts=args.n, seed=1, w_ref=0.6, epsilon=0.15)
    cols = generate_batch(config).columns()
    lowers = np.array(inclusive_range(-50_000, 20_000, 1_000), dtype=np.int64)
    thresholds = np.array(DEFAULT_THRESHOLDS, dtype=np.int64)
    synth_args = kernel_arguments(config)

    reference = {}
    rows = []
    for name, mod in sorted(backends.items()):
        grid = mod.count_grid(cols.click_lo, cols.click_hi, cols.clean, cols.code, lowers, 50_000, thresholds)
        synth = mod.synth_fill(*synth_args)
        if reference:
            assert np.array_equal(grid, reference["grid"]), "count_grid outputs differ"
            assert all(np.array_equal(x, y) for x, y in zip(synth, reference["synth"])), "synth outputs differ"
        else:
            reference = {"grid": grid, "synth": synth}
        t_grid = best_of(lambda: mod.count_grid(cols.click_lo, cols.click_hi, cols.clean, cols.code,
                                                lowers, 50_000, thresholds), args.repeat)
        t_synth = best_of(lambda: mod.synth_fill(*synth_args), args.repeat)
        rows.append((name, t_grid, t_synth))

    print(f"{args.n} events, grid {len(lowers)} offsets x {len(thresholds)} thresholds")
    print(f"{'backend':<10}{'count_grid [s]':>16}{'synth_fill [s]':>16}")
    for name, t_grid, t_synth in rows:
        print(f"{name:<10}{t_grid:>16.4f}{t_synth:>16.4f}")
    if len(rows) == 2:
        (_, g_cy, s_cy), (_, g_py, s_py) = rows
        print(f"{'speedup':<10}{g_py / g_cy:>15.1f}x{s_py / s_cy:>15.1f}x")


if __name__ == "__main__":
    main()
