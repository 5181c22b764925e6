"""Exact evaluators for the exponential sums of the circle-method estimates.

All ranges are dyadic, ``x <= n < 2x``.  Bounds with unspecified constants
are reported as ``lhs / rhs_shape`` ratios; only the two geometric-series
bounds have constants that tests assert.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .primes import sieve_range
from .trigpoly import _convergents

MAX_X = 10 ** 6


def _frac(t: float) -> float:
    return t - math.floor(t)


def _e(t):
    t = np.asarray(t, dtype=float)
    return np.exp(2j * np.pi * (t - np.floor(t)))


def _check_x(x: int):
    if x < 1:
        raise ValueError("x must be >= 1")


def ap_points(x: int, modulus: int, residue: int) -> tuple[int, int]:
    """First n >= x with n = residue (mod modulus), and how many lie in [x, 2x)."""
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    n0 = x + (residue - x) % modulus
    K = 0 if n0 >= 2 * x else (2 * x - n0 + modulus - 1) // modulus
    return n0, K


def geometric(theta: float, K: int) -> complex:
    """``sum_{j<K} e(j theta)`` in closed form."""
    if K <= 0:
        return 0j
    # centered so that theta near an integer stays well conditioned
    th = theta - round(theta)
    s = math.sin(math.pi * th)
    if s == 0.0:
        return complex(K)
    mag = math.sin(math.pi * K * th) / s
    ph = _frac(th * (K - 1) / 2)
    return mag * complex(math.cos(2 * math.pi * ph), math.sin(2 * math.pi * ph))


def ap_expsum(x: int, alpha: float, modulus: int = 1, residue: int = 0) -> complex:
    """``sum_{x <= n < 2x, n = residue mod modulus} e(alpha n)``."""
    _check_x(x)
    n0, K = ap_points(x, modulus, residue)
    a = alpha - round(alpha)
    lead = _frac(a * n0)
    return complex(np.exp(2j * np.pi * lead)) * geometric(a * modulus, K)


def ap_expsum_naive(x: int, alpha: float, modulus: int = 1, residue: int = 0) -> complex:
    n = np.arange(x, 2 * x, dtype=np.int64)
    n = n[(n - residue) % modulus == 0]
    return complex(np.sum(_e(_frac(alpha) * n)))


def geom_residual_ratio(x: int, beta: float, Q: int, c0: int) -> float:
    """``|S_{Q,c0} - S_{1,0}/Q| / (|beta| x + 1)`` for the AP geometric series."""
    d = ap_expsum(x, beta, Q, c0) - ap_expsum(x, beta) / Q
    return abs(d) / (abs(beta) * x + 1)


def _torus(t: float) -> float:
    f = _frac(t)
    return min(f, 1 - f)


@dataclass(frozen=True)
class ExpSumParams:
    """Phase with its rational approximation and the auxiliary moduli."""

    x: int
    alpha: float
    a: int
    q: int
    Q: int = 1
    r: int = 1
    c: int = 0
    M: int = 1

    def __post_init__(self):
        if self.q < 1 or math.gcd(self.a, self.q) != 1:
            raise ValueError(f"need (a, q) = 1 with q >= 1, got a={self.a}, q={self.q}")

    @property
    def beta(self) -> float:
        return self.alpha - self.a / self.q

    def require_close(self, bound: float, what: str):
        if _torus(self.alpha - self.a / self.q) > bound:
            raise ValueError(f"|alpha - a/q| exceeds {what}")


@dataclass(frozen=True)
class BoundReport:
    lhs: float
    rhs: float
    ratio: float
    asserted: bool
    params: dict

    def to_dict(self) -> dict:
        return asdict(self)


def geom_series_bound(p: ExpSumParams) -> BoundReport:
    """``|sum_{x <= n < 2x, n = c mod Q} e(alpha n)|`` against ``q / (Q, q)``.

    Requires ``(Q, q) < q`` and ``|alpha - a/q| <= 1/(2qQ)``; then
    ``||alpha Q|| >= (Q, q)/(2q)``, so the ratio never exceeds 1.
    """
    h = math.gcd(p.Q, p.q)
    if h >= p.q:
        raise ValueError("need (Q, q) < q")
    p.require_close(1 / (2 * p.q * p.Q), "1/(2qQ)")
    lhs = abs(ap_expsum(p.x, p.alpha, p.Q, p.c))
    rhs = p.q / h
    return BoundReport(lhs, rhs, lhs / rhs, True, asdict(p))


def tau_k_table(n_max: int, k: int) -> np.ndarray:
    """``tau_k(n)`` for 0 <= n < n_max (entry 0 unused), by repeated divisor sums."""
    if k < 1:
        raise ValueError("k must be >= 1")
    t = np.ones(n_max, dtype=np.int64)
    t[0] = 0
    for _ in range(k - 1):
        nxt = np.zeros(n_max, dtype=np.int64)
        for d in range(1, n_max):
            nxt[d::d] += t[d]
        t = nxt
    return t


def _best_convergent(alpha: float, ok, cost):
    """Among convergents a/q of alpha passing ``ok``, the one of least ``cost``."""
    best = None
    x = Fraction(alpha)
    x -= math.floor(x)
    for a, q in _convergents(x):
        if ok(a, q):
            c = cost(q)
            if best is None or c < best[0]:
                best = (c, a % q, q)
    if best is None:
        return 0, 1
    return best[1], best[2]


def tau_min_sum(alpha: float, M: int, x: int, k: int = 2, q: int | None = None) -> BoundReport:
    """``sum_{M <= m < 2M} tau_k(m) min(x/M, 1/||alpha m||)``.

    The companion shape ``(x/q^.5 + (xM)^.5 + (xq)^.5) (log 3x)^(k^2/2)``
    needs ``|alpha - a/q| < 1/q^2``; without an explicit q the convergent
    (all of which qualify) with q <= x minimizing the shape is used.
    """
    if not 1 <= M <= x:
        raise ValueError("need 1 <= M <= x")
    if k < 2:
        raise ValueError("k must be >= 2")
    tau = tau_k_table(2 * M, k)[M:]
    m = np.arange(M, 2 * M, dtype=np.int64)
    a = _frac(alpha)
    ph = a * m
    dist = np.abs(ph - np.round(ph))
    cap = x / M
    # where dist * cap < 1 the cap applies, so only divide elsewhere
    big = dist * cap >= 1.0
    term = np.full(dist.shape, cap)
    term[big] = 1.0 / dist[big]
    lhs = float(np.sum(tau * term))
    L = math.log(3 * x) ** (k * k / 2)

    def shape(qq):
        return (x / math.sqrt(qq) + math.sqrt(x * M) + math.sqrt(x * qq)) * L

    if q is None:
        _, q = _best_convergent(alpha, lambda aa, qq: qq <= x, shape)
    rhs = shape(q)
    return BoundReport(lhs, rhs, lhs / rhs, False, dict(alpha=alpha, M=M, x=x, k=k, q=q))


def tau_min_sum_naive(alpha: float, M: int, x: int, k: int = 2) -> float:
    from .primes import factorize
    total = 0.0
    for m in range(M, 2 * M):
        t = 1
        if m > 1:
            f = factorize(m)
            for p in set(f):
                e = f.count(p)
                t *= math.comb(e + k - 1, k - 1)
        d = _torus(alpha * m)
        total += t * (x / M if d == 0 else min(x / M, 1 / d))
    return total


def _coprime_mask(d: int) -> np.ndarray:
    return np.gcd(np.arange(d), d) == 1


def _max_residue(values: np.ndarray, w: np.ndarray, d: int) -> float:
    re, im = kernels.residue_sums(values, np.ascontiguousarray(w.real), np.ascontiguousarray(w.imag), d)
    mag = np.hypot(re, im)[_coprime_mask(d)]
    return float(mag.max(initial=0.0))


def _pairs(x: int, M: int, coeffs: Sequence[float]):
    """Products mn in [x, 2x) with M <= m < 2M, and the weight a_m of each."""
    vals, wts = [], []
    for i, m in enumerate(range(M, 2 * M)):
        am = coeffs[i]
        if am == 0:
            continue
        n = np.arange(-(-x // m), -(-2 * x // m), dtype=np.int64)
        vals.append(m * n)
        wts.append(np.full(n.size, float(am)))
    if not vals:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    return np.concatenate(vals), np.concatenate(wts)


def type_one_lhs(x: int, Q: int, M: int, alpha: float, coeffs: Sequence[float] | None = None,
                 r_max: int | None = None) -> float:
    """``sum_{r <= x^.5} max_{(c, rQ)=1} |sum_{x <= mn < 2x, mn = c (rQ), M <= m < 2M} a_m e(alpha mn)|``."""
    _check_x(x)
    if x > MAX_X:
        raise ValueError(f"x={x} above the enumeration budget {MAX_X}")
    if Q < 1 or Q * Q > x:
        raise ValueError("need 1 <= Q <= x^(1/2)")
    coeffs = np.ones(M) if coeffs is None else np.asarray(coeffs, dtype=float)
    if coeffs.size != M:
        raise ValueError(f"need {M} coefficients for m in [M, 2M)")
    if np.any(np.abs(coeffs) > 1 + 1e-12):
        raise ValueError("coefficients must satisfy |a_m| <= 1")
    vals, wts = _pairs(x, M, coeffs)
    if vals.size == 0:
        return 0.0
    w = wts * _e(_frac(alpha) * vals)
    r_max = math.isqrt(x) if r_max is None else r_max
    return math.fsum(_max_residue(vals, w, r * Q) for r in range(1, r_max + 1))


def type_one_lhs_naive(x: int, Q: int, M: int, alpha: float, coeffs=None, r_max=None) -> float:
    coeffs = [1.0] * M if coeffs is None else list(coeffs)
    r_max = math.isqrt(x) if r_max is None else r_max
    total = 0.0
    for r in range(1, r_max + 1):
        d = r * Q
        sums = [0j] * d
        for i, m in enumerate(range(M, 2 * M)):
            for n in range(-(-x // m), -(-2 * x // m)):
                v = m * n
                sums[v % d] += coeffs[i] * complex(np.exp(2j * np.pi * _frac(alpha * v)))
        total += max((abs(sums[c]) for c in range(d) if math.gcd(c, d) == 1), default=0.0)
    return total


def type_one_bound(x: int, Q: int, M: int, alpha: float, coeffs=None, q: int | None = None,
                   a: int | None = None) -> BoundReport:
    """Type I LHS against ``(x/Q)((h/q)^.5 + (MQ/x^.5)^.5 + (q/(x/Q))^.5)(log x)^4``, h = (q, Q).

    The shape assumes ``|alpha - a/q| < 1/(Q q^2)``; without an explicit q
    the qualifying convergent minimizing the shape is used.
    """
    lhs = type_one_lhs(x, Q, M, alpha, coeffs)
    L4 = math.log(x) ** 4

    def shape(qq):
        h = math.gcd(qq, Q)
        return (x / Q) * (math.sqrt(h / qq) + math.sqrt(M * Q / math.sqrt(x)) + math.sqrt(qq * Q / x)) * L4

    if q is None:
        a, q = _best_convergent(alpha, lambda aa, qq: qq <= x and abs(_frac(alpha) - aa / qq) < 1 / (Q * qq * qq), shape)
    rhs = shape(q)
    return BoundReport(lhs, rhs, lhs / rhs, False, dict(x=x, Q=Q, M=M, alpha=alpha, a=a, q=q))


def _primes_in(x: int) -> np.ndarray:
    _check_x(x)
    return sieve_range(x, 2 * x).primes()


def prime_ap_expsum(x: int, alpha: float, modulus: int = 1, residue: int = 0) -> complex:
    """``sum_{x <= p < 2x, p = residue mod modulus} e(alpha p)``."""
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    p = _primes_in(x)
    p = p[(p - residue) % modulus == 0]
    return complex(np.sum(_e(_frac(alpha) * p)))


def prime_ap_expsum_naive(x: int, alpha: float, modulus: int = 1, residue: int = 0) -> complex:
    from .primes import factorize
    s = 0j
    for n in range(max(x, 2), 2 * x):
        if (n - residue) % modulus == 0 and len(factorize(n)) == 1:
            s += complex(np.exp(2j * np.pi * _frac(alpha * n)))
    return s


def _phi(n: int) -> int:
    from .primes import factorize
    out = n
    for p in set(factorize(n)) if n > 1 else ():
        out = out // p * (p - 1)
    return out


def major_arc_report(x: int, alpha: float, Q: int, eps: float = 0.1, C2: float = 1.0) -> BoundReport:
    """Primes in APs to moduli rQ against their logarithmic main term.

    LHS ``sum_{r <= x^(1/2-eps)} max_{(c,rQ)=1} |sum_{p = c (rQ)} e(alpha p)
    - Q/phi(rQ) sum_{n = c (Q)} e(alpha n)/log n|`` over ``[x, 2x)``; shape
    ``x / (Q (log x)^C2)``.  Reported, never asserted.
    """
    p = _primes_in(x)
    wp = _e(_frac(alpha) * p)
    n = np.arange(x, 2 * x, dtype=np.int64)
    wn = _e(_frac(alpha) * n) / np.log(n)
    # main term depends on c only through c mod Q
    mre, mim = kernels.residue_sums(n, np.ascontiguousarray(wn.real), np.ascontiguousarray(wn.imag), Q)
    main_by_c = mre + 1j * mim
    r_max = max(1, int(x ** (0.5 - eps)))
    total = []
    for r in range(1, r_max + 1):
        d = r * Q
        re, im = kernels.residue_sums(p, np.ascontiguousarray(wp.real), np.ascontiguousarray(wp.imag), d)
        c = np.arange(d)
        diff = (re + 1j * im) - Q / _phi(d) * main_by_c[c % Q]
        total.append(float(np.abs(diff)[_coprime_mask(d)].max(initial=0.0)))
    lhs = math.fsum(total)
    rhs = x / (Q * math.log(x) ** C2)
    return BoundReport(lhs, rhs, lhs / rhs, False, dict(x=x, alpha=alpha, Q=Q, eps=eps, C2=C2, r_max=r_max))


def minor_arc_report(x: int, alpha: float, Q: int = 1, C: float = 1.0, q: int | None = None) -> BoundReport:
    """``sum_{r <= x^(1/8)} max_{(c,rQ)=1} |sum_{p = c (rQ)} e(alpha p)|`` against
    ``(x/Q)((log x)^(C/2)/(q/h)^(1/8) + (log x)^(C/2) Q^.5 q^(1/8)/x^(1/8) + (log x)^(-C/8))(log x)^15``,
    h = (q, Q^2).  Reported, never asserted.
    """
    p = _primes_in(x)
    wp = _e(_frac(alpha) * p)
    r_max = max(1, int(round(x ** 0.125, 9)))
    lhs = math.fsum(_max_residue(p, wp, r * Q) for r in range(1, r_max + 1))
    L = math.log(x)

    def shape(qq):
        h = math.gcd(qq, Q * Q)
        return (x / Q) * (L ** (C / 2) / (qq / h) ** 0.125
                          + L ** (C / 2) * math.sqrt(Q) * qq ** 0.125 / x ** 0.125
                          + L ** (-C / 8)) * L ** 15

    if q is None:
        bound = lambda aa, qq: qq <= x and abs(_frac(alpha) - aa / qq) < 1 / (4 * qq * qq * Q * Q * L ** (2 * C))
        _, q = _best_convergent(alpha, bound, shape)
    rhs = shape(q)
    return BoundReport(lhs, rhs, lhs / rhs, False, dict(x=x, alpha=alpha, Q=Q, C=C, q=q, r_max=r_max))
