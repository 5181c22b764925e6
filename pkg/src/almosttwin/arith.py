"""Linear forms, singular series, Ramanujan-type sums and the W-trick."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .primes import factorize, sieve_range, small_primes

# residue enumeration limit for the W-trick
MAX_W = 10 ** 7
NAMED_POLYS = {
    "n": (0, 1),
    "n(n+2)": (0, 2, 1),
    "n^2+1": (1, 0, 1),
}


@dataclass(frozen=True)
class LinearFormSystem:
    """Forms ``L_i(n) = a_i n + b_i`` with ``a_i >= 1``, pairwise distinct."""

    forms: tuple[tuple[int, int], ...]

    def __post_init__(self):
        forms = tuple((int(a), int(b)) for a, b in self.forms)
        if not forms:
            raise ValueError("need at least one form")
        if any(a < 1 for a, _ in forms):
            raise ValueError("leading coefficients must be >= 1")
        if len(set(forms)) != len(forms):
            raise ValueError("forms must be distinct")
        object.__setattr__(self, "forms", forms)

    @classmethod
    def parse(cls, text: str) -> "LinearFormSystem":
        """``"a1,b1;a2,b2"``."""
        pairs = [tuple(int(x) for x in part.split(",")) for part in text.split(";") if part.strip()]
        if any(len(p) != 2 for p in pairs):
            raise ValueError(f"cannot parse forms {text!r}")
        return cls(tuple(pairs))

    @property
    def k(self) -> int:
        return len(self.forms)

    def discriminant_factors(self) -> list[int]:
        """``a_i`` and ``a_i b_j - a_j b_i``; their product is the discriminant."""
        out = [a for a, _ in self.forms]
        for i, (ai, bi) in enumerate(self.forms):
            for aj, bj in self.forms[i + 1 :]:
                out.append(ai * bj - aj * bi)
        return out

    def discriminant(self) -> int:
        return reduce(lambda x, y: x * y, self.discriminant_factors(), 1)

    def special_primes(self) -> list[int]:
        """Primes where the local factor may differ from the generic one."""
        ps = set(small_primes(self.k).tolist())
        for d in self.discriminant_factors():
            if abs(d) > 1:
                ps.update(factorize(abs(d)))
        return sorted(ps)

    def __call__(self, n):
        return [a * n + b for a, b in self.forms]


def _check_prime(p: int):
    if p < 2 or len(factorize(p)) != 1:
        raise ValueError(f"{p} is not prime")


def local_root_count(forms: LinearFormSystem, p: int) -> int:
    """``#{n mod p : p | L_1(n) ... L_k(n)}`` by scanning residues."""
    _check_prime(p)
    n = np.arange(p, dtype=np.int64)
    hit = np.zeros(p, dtype=bool)
    for a, b in forms.forms:
        hit |= (a % p * n + b % p) % p == 0
    return int(hit.sum())


def is_admissible(forms: LinearFormSystem) -> bool:
    """No prime divides ``L_1(n) ... L_k(n)`` for every n.

    Only primes p <= k can have all residues covered while each form has at
    most one root; a prime p > k covers everything only when some form is
    identically 0 mod p, i.e. p divides gcd(a_i, b_i).  Those primes are
    scanned exhaustively.
    """
    ps = set(small_primes(forms.k).tolist())
    for a, b in forms.forms:
        g = math.gcd(a, b)
        if g > 1:
            ps.update(factorize(g))
    return all(local_root_count(forms, p) < p for p in sorted(ps))


@dataclass(frozen=True)
class SingularSeries:
    value: float
    tail_bound: float
    admissible: bool
    cutoff: int

    def to_dict(self) -> dict:
        return {"value": self.value, "tail_bound": self.tail_bound,
                "admissible": self.admissible, "cutoff": self.cutoff}


def _log_generic(ps: np.ndarray, k: int) -> np.ndarray:
    ps = ps.astype(float)
    return np.log1p(-k / ps) - k * np.log1p(-1 / ps)


def singular_series(forms: LinearFormSystem, p_cutoff: int) -> SingularSeries:
    """``prod_p (1 - nu_p/p) (1 - 1/p)^{-k}`` over p <= p_cutoff, plus the tail bound.

    Primes dividing the discriminant, and primes <= k, are always included
    even beyond the cutoff; every other prime has ``nu_p = k``.  For
    ``p >= 2k`` such a factor has ``|log| <= k(k-1)/p^2`` (the log expands as
    ``-sum_m (k^m - k)/(m p^m)``), so the omitted primes change the logarithm
    by at most ``k(k-1) / p_cutoff``.
    """
    k = forms.k
    max_a = max(a for a, _ in forms.forms)
    if p_cutoff < k + max_a:
        raise ValueError(f"p_cutoff must be >= k + max a_i = {k + max_a}")
    p_cutoff = max(p_cutoff, 2 * k)
    if not is_admissible(forms):
        return SingularSeries(0.0, 0.0, False, p_cutoff)
    # distinct proportional forms share a factor g > 1 in one of them, so they
    # never reach here: that form vanishes identically mod g
    special = forms.special_primes()
    logs = []
    for p in special:
        nu = local_root_count(forms, p)
        logs.append(math.log1p(-nu / p) - k * math.log1p(-1 / p))
    ps = sieve_range(2, p_cutoff + 1).primes()
    generic = ps[~np.isin(ps, np.array(special, dtype=np.int64))]
    logs.extend(_log_generic(generic, k).tolist())
    total = math.fsum(logs)
    value = math.exp(total)
    tail = value * math.expm1(k * (k - 1) / p_cutoff)
    return SingularSeries(value, tail, True, p_cutoff)


def parse_poly(text: str) -> tuple[int, ...]:
    """A named polynomial or comma-separated coefficients, constant term first."""
    t = text.replace(" ", "")
    if t in NAMED_POLYS:
        return NAMED_POLYS[t]
    return tuple(int(c) for c in t.split(","))


def _poly_mod(poly: Sequence[int], q: int) -> np.ndarray:
    n = np.arange(q, dtype=np.int64)
    acc = np.zeros(q, dtype=np.int64)
    for c in reversed(poly):
        acc = (acc * n + c % q) % q
    return acc


def root_count_mod(poly: Sequence[int], q: int) -> int:
    """``rho(q) = #{n mod q : P(n) = 0 mod q}``."""
    return int(np.count_nonzero(_poly_mod(poly, q) == 0))


def ramanujan_mod_sum(a: int, q: int, poly: Sequence[int]) -> tuple[complex, int]:
    """``sum_{n mod q, (P(n), q) = 1} e(a n / q)`` and ``rho(q)``."""
    if q < 1:
        raise ValueError("q must be positive")
    if math.gcd(a, q) != 1:
        raise ValueError(f"(a, q) = ({a}, {q}) not coprime")
    vals = _poly_mod(poly, q)
    n = np.flatnonzero(np.gcd(vals, q) == 1)
    s = np.exp(2j * np.pi * ((a * n) % q) / q).sum()
    return complex(s), int(np.count_nonzero(vals == 0))


def ramanujan_mod_sums(q: int, poly: Sequence[int]) -> tuple[np.ndarray, int]:
    """The sums for every a mod q at once (entry a), via one inverse FFT."""
    vals = _poly_mod(poly, q)
    mask = (np.gcd(vals, q) == 1).astype(float)
    return np.fft.ifft(mask) * q, int(np.count_nonzero(vals == 0))


def primorial(w: int) -> int:
    return math.prod(small_primes(w).tolist()) if w >= 2 else 1


def allowed_residues(W: int, twin_coprime: bool = False) -> np.ndarray:
    b = np.arange(1, W + 1, dtype=np.int64)
    ok = np.gcd(b, W) == 1
    if twin_coprime:
        ok &= np.gcd(b + 2, W) == 1
    return b[ok]


def w_trick(w: int, N_prime: int, count: int = 3, twin_coprime: bool = False) -> tuple[int, tuple[int, ...]]:
    """``W = prod_{p <= w} p`` and residues in [1, W] coprime to W adding up to N' mod W.

    For ``count=3`` this is the lexicographically smallest (b1, b2, b3).  For
    ``count=1`` the single residue is ``N' mod W`` itself, which must be
    allowed.  ``twin_coprime`` also asks for ``(b + 2, W) = 1``.
    """
    if count not in (1, 3):
        raise ValueError("count must be 1 or 3")
    W = primorial(w)
    if W > MAX_W:
        raise ValueError(f"W = {W} too large to enumerate residues")
    allowed = allowed_residues(W, twin_coprime)
    ok = np.zeros(W + 1, dtype=bool)
    ok[allowed] = True
    if count == 1:
        b = (N_prime - 1) % W + 1
        if not ok[b]:
            raise ValueError(f"N' = {N_prime} is not an allowed residue mod {W}")
        return W, (int(b),)
    for b1 in allowed.tolist():
        b3 = (N_prime - b1 - allowed - 1) % W + 1
        hit = np.flatnonzero(ok[b3])
        if hit.size:
            j = hit[0]
            return W, (b1, int(allowed[j]), int(b3[j]))
    raise ValueError(f"no admissible residue triple for N' = {N_prime} mod {W}")
