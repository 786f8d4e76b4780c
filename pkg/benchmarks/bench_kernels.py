"""Compare the compiled RK4 kernel with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from hgauge import _rk4_py

try:
    from hgauge import _rk4
except ImportError:
    _rk4 = None


def problem(K, d, seed=0):
    rng = np.random.default_rng(seed)
    Mn = rng.standard_normal((K + 1, d, d))
    Mm = rng.standard_normal((K, d, d))
    return Mn, Mm, np.eye(d), 1.0 / K


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _rk4 is None:
        print("compiled kernel not built; only the fallback is available")
    print(f"{'K':>6} {'d':>3} {'python ms':>11} {'cython ms':>11} {'speedup':>8} {'max diff':>10}")
    for K in (128, 512, 2048):
        for d in (2, 3):
            Mn, Mm, g0, h = problem(K, d)
            tp = min(timeit.repeat(lambda: _rk4_py.rk4_linear(Mn, Mm, g0, h), number=1, repeat=args.repeat))
            if _rk4 is None:
                print(f"{K:>6} {d:>3} {1e3 * tp:>11.3f} {'-':>11} {'-':>8} {'-':>10}")
                continue
            tc = min(timeit.repeat(lambda: _rk4.rk4_linear(Mn, Mm, g0, h), number=1, repeat=args.repeat))
            diff = np.abs(_rk4_py.rk4_linear(Mn, Mm, g0, h) - _rk4.rk4_linear(Mn, Mm, g0, h)).max()
            print(f"{K:>6} {d:>3} {1e3 * tp:>11.3f} {1e3 * tc:>11.3f} {tp / tc:>8.1f} {diff:>10.2e}")


if __name__ == "__main__":
    main()
