"""Benchmark the compiled matching kernels against their pure-Python twins.

Runs the two hot kernels (window verification, slot assignment) on random
workloads at several sizes, plus one end-to-end ``build_matching`` call with
the backend swapped in place, and prints a comparison table.

Usage: python3 benchmarks/bench_matcher.py [--repeat N]
"""

import argparse
import random
import timeit
from fractions import Fraction

from opequiv import BucketFunction, MatchMode, build_matching
from opequiv import matcher as matcher_mod
from opequiv import _matchcore_py as pure_core

try:
    from opequiv import _matchcore as compiled_core
except ImportError:
    compiled_core = None


def window_case(rng: random.Random, n: int):
    a = [rng.randint(0, 50) for _ in range(n)]
    # Pointwise domination with slack keeps every window satisfied, so the
    # scan runs to completion -- the worst case for the kernel.
    b = [v + rng.randint(0, 5) for v in a]
    return (a, b, -1, n - 1, n - 1)


def sdr_case(rng: random.Random, n: int):
    taus = sorted(rng.randint(0, 60) for _ in range(n))
    sigmas = sorted(rng.randint(0, 60) for _ in range(n))
    return (taus, sigmas, 1)


def end_to_end(core):
    """Time build_matching on a dense pair with the given kernel module."""
    rng = random.Random(5)
    counts = {j: rng.randint(100, 400) for j in range(0, 48)}
    tau = BucketFunction(delta=Fraction(1, 2), counts=dict(counts), N=1, M=Fraction(1))
    sigma = BucketFunction(delta=Fraction(1, 2), counts=dict(counts), N=1, M=Fraction(1))
    saved = matcher_mod._core
    matcher_mod._core = core
    try:
        return build_matching(tau, sigma, MatchMode.ONE_SIDED)
    finally:
        matcher_mod._core = saved


def best_time(fn, repeat: int) -> float:
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3, help="timing repetitions per case")
    args = parser.parse_args()

    rng = random.Random(1)
    cases = []
    for n in (256, 1024):
        cases.append((f"verify_windows n={n}", "verify_windows", window_case(rng, n)))
    for n in (10_000, 100_000):
        cases.append((f"sdr_match n={n}", "sdr_match", sdr_case(rng, n)))

    backends = [("pure", pure_core)]
    if compiled_core is not None:
        backends.insert(0, ("compiled", compiled_core))
    else:
        print("compiled kernel not built; timing the pure backend only\n")

    header = f"{'case':<28}" + "".join(f"{name:>14}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, fn_name, case_args in cases:
        times = [best_time(lambda c=core: getattr(c, fn_name)(*case_args), args.repeat)
                 for _, core in backends]
        row = f"{label:<28}" + "".join(f"{t * 1e6:>12.1f}us" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:>9.1f}x"
        print(row)

    times = [best_time(lambda c=core: end_to_end(c), args.repeat) for _, core in backends]
    row = f"{'build_matching ~12k elems':<28}" + "".join(f"{t * 1e3:>12.1f}ms" for t in times)
    if len(times) == 2:
        row += f"{times[1] / times[0]:>9.1f}x"
    print(row)


if __name__ == "__main__":
    main()
