"""Time the compiled kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--only name,...]

Each kernel is called once on both paths before timing, so numba compilation
is excluded, and the outputs are compared before anything is reported.
"""
import argparse
import time

import numpy as np

from almosttwin import kernels
from almosttwin.primes import small_primes


def _inputs():
    rng = np.random.default_rng(0)
    base = small_primes(2000)
    ps = small_primes(200_000).astype(np.int64)
    member = np.zeros(200_001, dtype=np.bool_)
    member[ps] = True
    vals = rng.integers(0, 10 ** 7, 400_000)
    return {
        "sieve_segment": (np.int64(1_000_000), np.int64(3_000_000), base),
        "omega_spf": (np.int64(1_000_000), np.int64(1_500_000), base),
        "first_triples": (np.arange(100_001, 200_000, 6, dtype=np.int64), ps, member),
        "fold_selberg": (20_000, 0.05, 4001),
        "residue_sums": (vals, rng.normal(size=vals.size), rng.normal(size=vals.size), 997),
        "cyclic_convolve": (rng.normal(size=3000), rng.normal(size=3000)),
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, atol=1e-9)


def _best(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--only", default="")
    args = ap.parse_args()
    if not kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy path is available")
        return
    wanted = set(filter(None, args.only.split(",")))
    print(f"{'kernel':<16}{'numba (s)':>12}{'numpy (s)':>12}{'speedup':>10}")
    for name, call in _inputs().items():
        if wanted and name not in wanted:
            continue
        fast, slow = kernels.IMPLEMENTATIONS[name]
        if not _same(fast(*call), slow(*call)):
            raise SystemExit(f"{name}: numba and numpy outputs differ")
        tf, ts = _best(fast, call, args.repeat), _best(slow, call, args.repeat)
        print(f"{name:<16}{tf:>12.4f}{ts:>12.4f}{ts / tf:>9.1f}x")


if __name__ == "__main__":
    main()
