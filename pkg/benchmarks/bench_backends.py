"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the pairwise hinge pass and the coherence scan on a few frame sizes
and prints per-call times for both backends.  The numba flavor is compiled
once before timing.

Usage: python benchmarks/bench_backends.py [repeats]
"""

import sys
import time

import numpy as np

from ebv import _accel
from ebv._kernels import (
    _coherence_scan_numpy,
    _deviation_sum_numpy,
    _hinge_pass_numpy,
)

SIZES = [(256, 64), (512, 64), (1000, 100), (1000, 200)]
BLOCK = 256


def time_call(fn, *args, repeats):
    fn(*args)  # warm up (and JIT-compile the numba flavor)
    start = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - start) / repeats


def main():
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 5
    rng = np.random.default_rng(0)
    kernels = [
        ("hinge_pass", _hinge_pass_numpy, lambda rows: (rows, 0.1, BLOCK)),
        ("coherence_scan", _coherence_scan_numpy, lambda rows: (rows, BLOCK)),
        ("deviation_sum", _deviation_sum_numpy, lambda rows: (rows, BLOCK)),
    ]
    numba_kernels = {}
    if _accel.HAVE_NUMBA:
        from ebv._kernels import (
            _coherence_scan_numba,
            _deviation_sum_numba,
            _hinge_pass_numba,
        )

        numba_kernels = {
            "hinge_pass": _hinge_pass_numba,
            "coherence_scan": _coherence_scan_numba,
            "deviation_sum": _deviation_sum_numba,
        }
    else:
        print("numba not available; timing the numpy path only")

    print(f"{'kernel':<16}{'n':>6}{'d':>6}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for n, d in SIZES:
        rows = rng.standard_normal((n, d))
        rows /= np.linalg.norm(rows, axis=1, keepdims=True)
        for name, numpy_fn, make_args in kernels:
            args = make_args(rows)
            t_np = time_call(numpy_fn, *args, repeats=repeats)
            if name in numba_kernels:
                t_nb = time_call(numba_kernels[name], *args, repeats=repeats)
                print(
                    f"{name:<16}{n:>6}{d:>6}{t_np * 1e3:>12.3f}"
                    f"{t_nb * 1e3:>12.3f}{t_np / t_nb:>10.2f}"
                )
            else:
                print(f"{name:<16}{n:>6}{d:>6}{t_np * 1e3:>12.3f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
