"""Time the compiled kernels against the pure-Python fallbacks.

    python benchmarks/bench_kernels.py [--max-n 18] [--repeat 3]
"""
import argparse
import timeit

import numpy as np

from drivenbs import _backend, _fallback
from drivenbs.rng import RandomSeed


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-n", type=int, default=18)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if _backend.NAME != "cython":
        print("compiled extension not built; only the fallback is available")
        return
    fast, slow = _backend.kernels, _fallback
    gen = RandomSeed(0).generator()

    print(f"{'kernel':<22}{'size':>10}{'cython s':>12}{'python s':>12}{'speedup':>10}")
    for n in range(8, args.max_n + 1, 2):
        a = np.ascontiguousarray(gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n)))
        tf = best_of(lambda: fast.ryser_gray(a), args.repeat)
        ts = best_of(lambda: slow.ryser_gray(a), args.repeat)
        print(f"{'ryser_gray':<22}{n:>10}{tf:>12.4f}{ts:>12.4f}{ts / tf:>10.1f}")

    for shots, sources in [(65536, 8), (65536, 64), (16384, 1000)]:
        u = gen.random((shots, sources))
        tf = best_of(lambda: fast.tally_trials(u, 0.2, 0.04, 2, False), args.repeat)
        ts = best_of(lambda: slow.tally_trials(u, 0.2, 0.04, 2, False), args.repeat)
        print(f"{'tally_trials':<22}{f'{shots}x{sources}':>10}{tf:>12.4f}{ts:>12.4f}{ts / tf:>10.1f}")


if __name__ == "__main__":
    main()
