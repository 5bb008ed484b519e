"""Time the numba and numpy kernel paths on probe-sized inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both paths run in the same process through the ``backend`` argument; the
first numba call is reported separately since it includes compilation.
"""
import argparse
import time

import numpy as np

from continlab import _kernels as K


def _inputs(rng, C=4000, S=96, nlev=8):
    vals = rng.normal(size=(C, S))
    vals[rng.random((C, S)) < 0.05] = np.nan
    lev = np.sort(rng.integers(0, nlev, size=S))
    center = rng.normal(size=C)
    rows = rng.integers(-1, 2, size=(2000, 501)).astype(np.int8)
    return (vals, lev, center, nlev), rows


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    osc_args, rows = _inputs(rng)
    print(f"numba available: {K.HAVE_NUMBA}  default backend: {K.BACKEND}")
    cases = {
        "osc_levels": lambda b: K.osc_levels(*osc_args, backend=b),
        "flip_nodes": lambda b: K.flip_nodes(rows, backend=b),
    }
    for name, fn in cases.items():
        ref = fn("numpy")
        line = f"{name:11s} numpy {_best(lambda: fn('numpy'), args.repeat) * 1e3:8.2f} ms"
        if K.HAVE_NUMBA:
            t = time.perf_counter()
            out = fn("numba")
            first = time.perf_counter() - t
            same = np.array_equal(ref, out, equal_nan=ref.dtype.kind == "f")
            line += (f"   numba {_best(lambda: fn('numba'), args.repeat) * 1e3:8.2f} ms"
                     f"   first call {first * 1e3:8.1f} ms   identical={same}")
        print(line)


if __name__ == "__main__":
    main()
