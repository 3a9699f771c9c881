"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--sizes 1000 10000 100000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from ktraj.kernels import _slow

try:
    from ktraj.kernels import _fast
except ImportError:
    _fast = None


def cases(n, rng):
    s = np.linspace(0.0, 2.0, n)
    kappa = np.abs(rng.normal(5.0, 2.0, n))
    vcap = np.full(n, 4.0)
    v = np.abs(rng.normal(3.0, 0.5, n)) + 0.1
    data = rng.integers(0, 256, 16 * n, dtype=np.uint8)
    return {
        "speed_profile": lambda m: m.speed_profile(s, kappa, vcap, 60.0),
        "arrival_times": lambda m: m.arrival_times(s, v),
        "fnv1a64": lambda m: m.fnv1a64(data),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1_000, 10_000, 100_000])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _fast is None:
        print("compiled extension not built; only the fallback is timed")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<15}{'n':>9}{'python ms':>12}{'cython ms':>12}{'speed-up':>10}")
    for n in args.sizes:
        for name, call in cases(n, rng).items():
            number = 1 if n >= 100_000 else 3
            slow = min(timeit.repeat(lambda: call(_slow), number=number,
                                     repeat=args.repeat)) / number
            if _fast is None:
                print(f"{name:<15}{n:>9}{slow * 1e3:>12.3f}{'-':>12}{'-':>10}")
                continue
            fast = min(timeit.repeat(lambda: call(_fast), number=number,
                                     repeat=args.repeat)) / number
            print(f"{name:<15}{n:>9}{slow * 1e3:>12.3f}{fast * 1e3:>12.3f}{slow / fast:>9.0f}x")


if __name__ == "__main__":
    main()
