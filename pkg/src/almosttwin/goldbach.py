"""Ternary Goldbach representations with constrained primes."""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .primes import ConstraintSpec, UNRESTRICTED, constrained_primes, satisfies, sieve_range, witness

MAX_N = 10 ** 8
COUNT_BUDGET = 2 * 10 ** 6


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("ALMOSTTWIN_WORKERS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class RepresentationResult:
    N: int
    triple: tuple[int, int, int] | None
    count: int | None = None
    witnesses: tuple = ()

    @property
    def found(self) -> bool:
        return self.triple is not None

    def recheck(self, spec: ConstraintSpec) -> bool:
        """Independent trial-division check of the triple."""
        if self.triple is None:
            return False
        return sum(self.triple) == self.N and all(satisfies(p, spec) for p in self.triple)


class PrimePool:
    """Constrained primes below a bound, with O(1) membership."""

    def __init__(self, limit: int, spec: ConstraintSpec):
        if limit > MAX_N:
            raise ValueError(f"bound {limit} above {MAX_N}")
        self.limit = limit
        self.spec = spec
        self.table = sieve_range(2, max(limit, 3) + spec.margin + 1)
        self.primes = constrained_primes(self.table, spec, hi=max(limit, 3) + 1)
        self.member = np.zeros(max(limit, 3) + 1, dtype=np.bool_)
        self.member[self.primes] = True

    def first_triples(self, targets: np.ndarray, workers: int = 1) -> np.ndarray:
        targets = np.asarray(targets, dtype=np.int64)
        if workers <= 1 or targets.size < 2 * workers:
            return kernels.first_triples(targets, self.primes, self.member)
        parts = np.array_split(targets, workers)
        with ThreadPoolExecutor(workers) as ex:
            outs = list(ex.map(lambda t: kernels.first_triples(t, self.primes, self.member), parts))
        return np.concatenate(outs)


def _check_target(N: int, spec: ConstraintSpec, force: bool):
    if N % 2 == 0:
        raise ValueError(f"N={N} is even")
    if spec.kind == "chen" and N % 6 != 3 and not force:
        raise ValueError(f"N={N} is not 3 mod 6; pass force=True to search anyway")
    if N > MAX_N:
        raise ValueError(f"N={N} above {MAX_N}")


def find_representation(N: int, spec: ConstraintSpec = UNRESTRICTED, force: bool = False,
                        pool: PrimePool | None = None) -> RepresentationResult:
    """Lexicographically first ``p1 <= p2 <= p3`` with sum N, each satisfying spec.

    An absent triple means the search over all constrained primes was exhaustive.
    """
    _check_target(N, spec, force)
    if pool is None or pool.limit < N or pool.spec != spec:
        pool = PrimePool(N, spec)
    row = pool.first_triples(np.array([N]))[0]
    if row[0] < 0:
        return RepresentationResult(N, None)
    trip = tuple(int(v) for v in row)
    wit = tuple(tuple(witness(p, spec, pool.table)) for p in trip)
    return RepresentationResult(N, trip, None, wit)


def _conv_rounded(a: np.ndarray, b: np.ndarray, L: int) -> np.ndarray:
    size = 1 << (L - 1).bit_length()
    out = np.fft.irfft(np.fft.rfft(a, size) * np.fft.rfft(b, size), size)[:L]
    r = np.rint(out)
    resid = float(np.max(np.abs(out - r), initial=0.0))
    if resid > 0.25:
        raise ArithmeticError(f"FFT rounding residual {resid:.3g} too large for exact counts")
    return r


def representation_count(N_max: int, spec: ConstraintSpec = UNRESTRICTED) -> np.ndarray:
    """Ordered counts ``r(N) = #{(p1, p2, p3) : p1 + p2 + p3 = N}`` for 0 <= N <= N_max.

    The indicator lives on a cyclic group of length at least ``3 N_max + 1``,
    so no sum wraps around.  Pairs are counted first and rounded to exact
    integers, then convolved once more.
    """
    if N_max < 0:
        raise ValueError("N_max must be >= 0")
    if N_max > COUNT_BUDGET:
        raise ValueError(f"N_max={N_max} above the convolution budget {COUNT_BUDGET}")
    f = np.zeros(N_max + 1)
    if N_max >= 2:
        pool = PrimePool(N_max, spec)
        f[pool.primes[pool.primes <= N_max]] = 1.0
    L = 3 * N_max + 1
    pairs = _conv_rounded(f, f, L)
    triples = _conv_rounded(pairs, f, L)
    return triples[: N_max + 1].astype(np.int64)


def representation_count_naive(N: int, spec: ConstraintSpec = UNRESTRICTED) -> int:
    ps = [p for p in range(2, N + 1) if satisfies(p, spec)]
    s = set(ps)
    return sum(1 for a in ps for b in ps if N - a - b in s)


def admissible_targets(lo: int, hi: int, spec: ConstraintSpec) -> np.ndarray:
    """Odd N in [lo, hi], restricted to 3 mod 6 for the chen constraint."""
    N = np.arange(max(lo, 1), hi + 1, dtype=np.int64)
    N = N[N % 2 == 1]
    if spec.kind == "chen":
        N = N[N % 6 == 3]
    return N


@dataclass
class ScanReport:
    lo: int
    hi: int
    spec: ConstraintSpec
    targets: np.ndarray = field(repr=False)
    triples: np.ndarray = field(repr=False)
    counts: np.ndarray | None = field(default=None, repr=False)

    @property
    def missing(self) -> list[int]:
        return self.targets[self.triples[:, 0] < 0].tolist()

    @property
    def n_targets(self) -> int:
        return int(self.targets.size)

    def summary(self) -> dict:
        d = {"lo": self.lo, "hi": self.hi, "constraint": self.spec.label(),
             "targets": self.n_targets, "found": self.n_targets - len(self.missing),
             "missing": self.missing}
        if self.counts is not None and self.counts.size:
            d.update(min_count=int(self.counts.min()), mean_count=float(self.counts.mean()))
        return d

    def rows(self):
        for i, N in enumerate(self.targets.tolist()):
            t = self.triples[i]
            found = bool(t[0] >= 0)
            c = "" if self.counts is None else int(self.counts[i])
            yield (N, int(found), *(int(v) if found else "" for v in t), c)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "found", "p1", "p2", "p3", "count"])
        w.writerows(self.rows())
        return buf.getvalue()


def scan(N_lo: int, N_hi: int, spec: ConstraintSpec = UNRESTRICTED, count: bool = False,
         workers: int | None = None) -> ScanReport:
    """First triple (and optionally the ordered count) for every admissible N in range.

    Missing N are reported, not raised: the theorems only cover large N.
    """
    targets = admissible_targets(N_lo, N_hi, spec)
    if targets.size == 0:
        return ScanReport(N_lo, N_hi, spec, targets, np.zeros((0, 3), dtype=np.int64),
                          np.zeros(0, dtype=np.int64) if count else None)
    pool = PrimePool(int(targets[-1]), spec)
    trip = pool.first_triples(targets, workers or default_workers())
    counts = representation_count(int(targets[-1]), spec)[targets] if count else None
    return ScanReport(N_lo, N_hi, spec, targets, trip, counts)
