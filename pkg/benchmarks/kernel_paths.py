"""Timing comparison of the compiled and plain-numpy kernel paths.

Both paths compute identical quantities; the env flag FERMISKIN_NO_JIT
selects between them at call time, so one process can time both. The
integrand-family evaluation dominates panel refinement, which makes it
the representative microbenchmark; one full field point shows what the
difference means end to end.

Run: python3 benchmarks/kernel_paths.py [--n 200000] [--repeats 5]
"""

import argparse
import os
import statistics
import time

import numpy as np

from fermiskin._kernels import HAVE_NUMBA, JIT_ENV_VAR, family_grid
from fermiskin.field import field_ratio_rescaled
from fermiskin.materials import get_material, params_for


def time_call(fn, repeats):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000, help="q-grid size")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--x", type=float, default=3e-5, help="field depth, cm")
    args = ap.parse_args()

    qs = np.concatenate(
        [
            np.geomspace(1e-6, 5e-3, args.n // 4),
            np.linspace(5e-3, 0.0995, args.n // 4),
            0.1 + np.geomspace(1e-6, 0.3, args.n // 4),
            np.linspace(0.5, 5.0, args.n - 3 * (args.n // 4)),
        ]
    )
    params = params_for(get_material("na"), 1e-2, 1e-4)

    def family():
        family_grid(qs, 0, 1e-2, 1e-4, 1)

    def point():
        field_ratio_rescaled(args.x, params)

    paths = [("numpy", {JIT_ENV_VAR: "1"})]
    if HAVE_NUMBA:
        paths.insert(0, ("numba", None))
    else:
        print("numba unavailable; timing the fallback path only")

    results = {}
    for name, env in paths:
        if env is None:
            os.environ.pop(JIT_ENV_VAR, None)
        else:
            os.environ.update(env)
        family()  # warm-up: first numba call compiles
        point()
        results[name] = (
            time_call(family, args.repeats),
            time_call(point, args.repeats),
        )
    os.environ.pop(JIT_ENV_VAR, None)

    print(f"{'path':<8} {'family_grid(' + str(len(qs)) + ')':>22} {'field point':>14}")
    for name, (tf, tp) in results.items():
        print(f"{name:<8} {tf * 1e3:>19.2f} ms {tp * 1e3:>11.2f} ms")
    if len(results) == 2:
        tf_ratio = results["numpy"][0] / results["numba"][0]
        tp_ratio = results["numpy"][1] / results["numba"][1]
        print(f"speedup {tf_ratio:>21.1f} x {tp_ratio:>12.1f} x")


if __name__ == "__main__":
    main()
