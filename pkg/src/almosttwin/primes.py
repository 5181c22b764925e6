"""Prime tables, factorization and the almost-twin constraint predicates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from . import kernels

SEGMENT = 1 << 20
# largest hi for which segment arithmetic stays inside int64
MAX_HI = (1 << 62)
FACTOR_BOUND = 10 ** 14


@lru_cache(maxsize=8)
def small_primes(limit: int) -> np.ndarray:
    """All primes <= limit, by a plain Eratosthenes sieve."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    out = np.flatnonzero(is_p).astype(np.int64)
    out.setflags(write=False)
    return out


def _primes_covering(limit: int) -> np.ndarray:
    # round up so that repeated calls share a cached table
    return small_primes(max(1024, 1 << int(limit).bit_length()))


def _base_primes(hi: int) -> np.ndarray:
    return _primes_covering(math.isqrt(max(hi - 1, 1)) + 1)


@dataclass(frozen=True)
class PrimeTable:
    """Primality of every integer in ``[lo, hi)``.

    ``membership[i]`` is True iff ``lo + i`` is prime.  The table is
    read-only once built.
    """

    lo: int
    hi: int
    membership: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.membership.setflags(write=False)

    def __contains__(self, n: int) -> bool:
        return self.is_prime(n)

    def __len__(self) -> int:
        return int(np.count_nonzero(self.membership))

    def is_prime(self, n: int) -> bool:
        if not self.lo <= n < self.hi:
            raise ValueError(f"{n} outside table range [{self.lo}, {self.hi})")
        return bool(self.membership[n - self.lo])

    def primes(self, lo: int | None = None, hi: int | None = None) -> np.ndarray:
        lo = self.lo if lo is None else max(lo, self.lo)
        hi = self.hi if hi is None else min(hi, self.hi)
        if hi <= lo:
            return np.zeros(0, dtype=np.int64)
        return np.flatnonzero(self.membership[lo - self.lo : hi - self.lo]).astype(np.int64) + lo

    def count(self, x: int) -> int:
        """Number of primes in ``[lo, x)``."""
        x = min(x, self.hi)
        return int(np.count_nonzero(self.membership[: max(0, x - self.lo)]))


def sieve_range(lo: int, hi: int) -> PrimeTable:
    """Segmented sieve of Eratosthenes over ``[lo, hi)``.

    ``lo`` below 2 is treated as 2 (nothing smaller is prime).
    """
    lo, hi = int(lo), int(hi)
    if hi <= lo:
        raise ValueError(f"empty range: hi={hi} <= lo={lo}")
    if hi > MAX_HI:
        raise OverflowError(f"hi={hi} exceeds the 64-bit segment bound {MAX_HI}")
    lo = max(lo, 0)
    base = _base_primes(hi)
    parts = [kernels.sieve_segment(s, min(hi, s + SEGMENT), base)
             for s in range(lo, hi, SEGMENT)]
    return PrimeTable(lo, hi, np.concatenate(parts))


def omega_table(lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """Big-Omega and smallest prime factor for every m in ``[lo, hi)``.

    Entries for m < 2 are zero.
    """
    lo, hi = max(int(lo), 0), int(hi)
    if hi <= lo:
        return np.zeros(0, dtype=np.int8), np.zeros(0, dtype=np.int64)
    base = _base_primes(hi)
    om, sp = [], []
    for s in range(lo, hi, SEGMENT):
        e = min(hi, s + SEGMENT)
        o, p = kernels.omega_spf(s, e, base)
        om.append(o)
        sp.append(p)
    omega, spf = np.concatenate(om), np.concatenate(sp)
    small = np.arange(lo, min(hi, 2)) - lo
    omega[small] = 0
    spf[small] = 0
    return omega, spf


def factorize(n: int, bound: int = FACTOR_BOUND) -> list[int]:
    """Prime factors of n with multiplicity, in nondecreasing order.

    Deterministic trial division by sieved primes up to sqrt(n).
    """
    n = int(n)
    if n < 2:
        raise ValueError(f"factorize needs n >= 2, got {n}")
    if n > bound:
        raise ValueError(f"n={n} above factorization bound {bound}")
    out = []
    for p in _primes_covering(math.isqrt(n) + 1).tolist():
        if p * p > n:
            break
        while n % p == 0:
            out.append(p)
            n //= p
    if n > 1:
        out.append(n)
    return out


def is_P2(n: int, rough: int = 2) -> bool:
    """True iff n has at most two prime factors (with multiplicity), all >= rough."""
    f = factorize(n)
    return len(f) <= 2 and f[0] >= rough


@dataclass(frozen=True)
class ConstraintSpec:
    """Which primes count as "almost twin".

    kind is ``"none"`` (every prime), ``"chen"`` (p + 2 is a P2 whose prime
    factors are all >= rough) or ``"cluster"`` (``[p, p + H]`` holds at least
    m primes).
    """

    kind: str = "none"
    m: int = 2
    H: int = 6
    rough: int = 2

    def __post_init__(self):
        if self.kind not in ("none", "chen", "cluster"):
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if self.m < 1 or self.H < 1:
            raise ValueError("m and H must be positive")
        if self.rough < 2:
            raise ValueError("rough threshold must be >= 2")

    @property
    def margin(self) -> int:
        """How far past the last candidate the prime table has to reach."""
        if self.kind == "chen":
            return 3
        if self.kind == "cluster":
            return self.H + 1
        return 0

    def label(self) -> str:
        if self.kind == "chen":
            return f"chen(rough={self.rough})"
        if self.kind == "cluster":
            return f"cluster(m={self.m},H={self.H})"
        return "none"


UNRESTRICTED = ConstraintSpec("none")


def _chen_mask(primes: np.ndarray, rough: int) -> np.ndarray:
    if primes.size == 0:
        return np.zeros(0, dtype=bool)
    lo, hi = int(primes[0]) + 2, int(primes[-1]) + 3
    omega, spf = omega_table(lo, hi)
    idx = primes + 2 - lo
    return (omega[idx] <= 2) & (spf[idx] >= rough)


def _cluster_mask(primes: np.ndarray, table: PrimeTable, m: int, H: int) -> np.ndarray:
    if m == 1:
        return np.ones(primes.size, dtype=bool)
    allp = table.primes()
    start = np.searchsorted(allp, primes, side="left")
    stop = np.searchsorted(allp, primes + H, side="right")
    return (stop - start) >= m


def constrained_primes(table: PrimeTable, spec: ConstraintSpec,
                       lo: int | None = None, hi: int | None = None) -> np.ndarray:
    """Primes p in ``[lo, hi)`` satisfying ``spec``, sorted.

    ``hi`` defaults to the largest bound the table can decide; an explicit
    ``hi`` too close to ``table.hi`` raises ``ValueError``.
    """
    decidable = table.hi - spec.margin
    if hi is None:
        hi = decidable
    elif hi > decidable:
        raise ValueError(
            f"table ends at {table.hi}; {spec.label()} needs it to reach {hi + spec.margin}")
    lo = table.lo if lo is None else max(lo, table.lo)
    p = table.primes(lo, hi)
    if spec.kind == "chen":
        return p[_chen_mask(p, spec.rough)]
    if spec.kind == "cluster":
        return p[_cluster_mask(p, table, spec.m, spec.H)]
    return p


def constrained_upto(x: int, spec: ConstraintSpec) -> np.ndarray:
    """Constrained primes below x, sieving whatever margin the constraint needs."""
    table = sieve_range(2, max(x, 2) + spec.margin + 1)
    return constrained_primes(table, spec, hi=x)


def witness(p: int, spec: ConstraintSpec, table: PrimeTable | None = None) -> list[int]:
    """Evidence that p satisfies spec: the factorization of p+2 or the cluster primes."""
    if spec.kind == "chen":
        return factorize(p + 2)
    if spec.kind == "cluster":
        if table is None:
            table = sieve_range(p, p + spec.H + 1)
        return table.primes(p, p + spec.H + 1).tolist()
    return [p]


def satisfies(p: int, spec: ConstraintSpec) -> bool:
    """Independent single-integer recheck by trial division."""
    if p < 2 or len(factorize(p)) != 1:
        return False
    if spec.kind == "chen":
        return is_P2(p + 2, spec.rough)
    if spec.kind == "cluster":
        return sum(1 for q in range(p, p + spec.H + 1)
                   if q >= 2 and len(factorize(q)) == 1) >= spec.m
    return True


def iter_csv_rows(ps: Iterable[int], spec: ConstraintSpec, table: PrimeTable):
    for p in ps:
        yield p, " ".join(str(v) for v in witness(int(p), spec, table))
