"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from repi.kernels import backend_module


def cases(rng):
    a1, b1 = rng.random(2048), rng.random(2048)
    a2, b2 = rng.random((64, 64)), rng.random((64, 64))
    v, w = rng.random(1 << 20), rng.random(1 << 20)
    return {
        "direct_convolve_1d (2048 x 2048)": lambda m: m.direct_convolve_1d(a1, b1),
        "direct_convolve_2d (64^2 x 64^2)": lambda m: m.direct_convolve_2d(a2, b2),
        "power_sum (2^20, p=2.5)": lambda m: m.power_sum(v, w, 2.5),
        "xlogx_sum (2^20)": lambda m: m.xlogx_sum(v, w),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    mods = {"python": backend_module("python")}
    try:
        mods["cython"] = backend_module("cython")
    except ImportError:
        print("compiled backend not built; timing the fallback only")
    print(f"{'kernel':36s}" + "".join(f"{k:>12s}" for k in mods) + ("     speedup" if len(mods) == 2 else ""))
    for name, fn in cases(np.random.default_rng(0)).items():
        best = {k: min(timeit.repeat(lambda: fn(m), number=1, repeat=args.repeat)) for k, m in mods.items()}
        row = f"{name:36s}" + "".join(f"{best[k] * 1e3:10.2f}ms" for k in mods)
        if len(mods) == 2:
            row += f"{best['python'] / best['cython']:11.2f}x"
        print(row)


if __name__ == "__main__":
    main()
