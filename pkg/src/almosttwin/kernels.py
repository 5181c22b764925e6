"""Hot inner loops, each in two flavours.

Every kernel exists as a plain-loop version that numba compiles with
``@njit`` and as a vectorized numpy version.  The public name points at the
numba build unless numba is missing or ``ALMOSTTWIN_NO_NUMBA=1`` is set in
the environment, in which case the numpy version is used.  Both flavours are
importable directly (``*_numba`` / ``*_numpy``) so tests and the benchmark
can compare them.
"""
from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is an optional extra
    njit = None

HAVE_NUMBA = njit is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("ALMOSTTWIN_NO_NUMBA", "0") in ("", "0")


def _jit(fn):
    if njit is None:
        return fn
    return njit(cache=True, nogil=True)(fn)


# ---------------------------------------------------------------------------
# segment sieve: primality of every integer in [lo, hi)

def _sieve_segment_loop(lo, hi, base_primes):
    n = hi - lo
    mask = np.ones(n, dtype=np.bool_)
    for i in range(min(n, max(0, 2 - lo))):
        mask[i] = False
    for p in base_primes:
        pp = p * p
        if pp >= hi:
            break
        start = ((lo + p - 1) // p) * p
        if start < pp:
            start = pp
        for m in range(start - lo, n, p):
            mask[m] = False
    return mask


def _sieve_segment_numpy(lo, hi, base_primes):
    n = hi - lo
    mask = np.ones(n, dtype=np.bool_)
    mask[: min(n, max(0, 2 - lo))] = False
    for p in base_primes.tolist():
        pp = p * p
        if pp >= hi:
            break
        start = max(pp, -(-lo // p) * p)
        mask[start - lo :: p] = False
    return mask


# ---------------------------------------------------------------------------
# Omega (with multiplicity) and smallest prime factor for every m in [lo, hi)
# base_primes must contain every prime <= sqrt(hi - 1)

def _omega_spf_loop(lo, hi, base_primes):
    n = hi - lo
    rem = np.empty(n, dtype=np.int64)
    for i in range(n):
        rem[i] = lo + i
    omega = np.zeros(n, dtype=np.int8)
    spf = np.zeros(n, dtype=np.int64)
    for p in base_primes:
        if p * p > hi - 1:
            break
        start = ((lo + p - 1) // p) * p
        for m in range(start - lo, n, p):
            if spf[m] == 0:
                spf[m] = p
            r = rem[m]
            while r % p == 0:
                r //= p
                omega[m] += 1
            rem[m] = r
    for i in range(n):
        if rem[i] > 1:
            omega[i] += 1
            if spf[i] == 0:
                spf[i] = rem[i]
    return omega, spf


def _omega_spf_numpy(lo, hi, base_primes):
    n = hi - lo
    rem = np.arange(lo, hi, dtype=np.int64)
    omega = np.zeros(n, dtype=np.int8)
    spf = np.zeros(n, dtype=np.int64)
    for p in base_primes.tolist():
        if p * p > hi - 1:
            break
        pk = p
        while pk < hi:
            start = -(-lo // pk) * pk
            if start >= hi:
                break
            idx = np.arange(start - lo, n, pk)
            if pk == p:
                unset = idx[spf[idx] == 0]
                spf[unset] = p
            omega[idx] += 1
            rem[idx] //= p
            pk *= p
    big = rem > 1
    omega[big] += 1
    unset = big & (spf == 0)
    spf[unset] = rem[unset]
    return omega, spf


# ---------------------------------------------------------------------------
# lexicographically first p1 <= p2 <= p3 with p1 + p2 + p3 = N
# cprimes: sorted constrained primes; member[v] is True iff v is in cprimes

def _first_triples_loop(targets, cprimes, member):
    out = np.full((targets.shape[0], 3), -1, dtype=np.int64)
    k = cprimes.shape[0]
    for t in range(targets.shape[0]):
        N = targets[t]
        found = False
        for i in range(k):
            p1 = cprimes[i]
            if 3 * p1 > N:
                break
            for j in range(i, k):
                p2 = cprimes[j]
                p3 = N - p1 - p2
                if p3 < p2:
                    break
                if p3 < member.shape[0] and member[p3]:
                    out[t, 0] = p1
                    out[t, 1] = p2
                    out[t, 2] = p3
                    found = True
                    break
            if found:
                break
    return out


def _first_triples_numpy(targets, cprimes, member):
    out = np.full((targets.shape[0], 3), -1, dtype=np.int64)
    size = member.shape[0]
    for t, N in enumerate(targets.tolist()):
        for i, p1 in enumerate(cprimes.tolist()):
            if 3 * p1 > N:
                break
            hi = np.searchsorted(cprimes, (N - p1) // 2, side="right")
            p2 = cprimes[i:hi]
            p3 = N - p1 - p2
            ok = (p3 < size) & (p3 >= 0)
            hit = np.flatnonzero(ok & member[np.where(ok, p3, 0)])
            if hit.size:
                j = hit[0]
                out[t] = (p1, p2[j], p3[j])
                break
    return out


# ---------------------------------------------------------------------------
# Fourier coefficients of the Selberg majorant, folded modulo N:
#   F[j] = sum_{|k| <= D, k = j mod N} c_k,
#   c_0 = 2 eta + 1/(D+1),
#   c_k = psi(u) sin(2 pi k eta)/(pi k) + (1 - u) cos(2 pi k eta)/(D+1),  u = |k|/(D+1)
#   psi(u) = pi u (1-u) cot(pi u) + u

def _fold_selberg_loop(D, eta, N):
    F = np.zeros(N, dtype=np.float64)
    F[0] += 2.0 * eta + 1.0 / (D + 1)
    inv = 1.0 / (D + 1)
    for k in range(1, D + 1):
        u = k * inv
        psi = math.pi * u * (1.0 - u) / math.tan(math.pi * u) + u
        # k * eta reduced mod 1 before the trig calls
        ph = k * eta
        ph -= math.floor(ph)
        ang = 2.0 * math.pi * ph
        c = psi * math.sin(ang) / (math.pi * k) + (1.0 - u) * math.cos(ang) * inv
        j = k % N
        F[j] += c
        F[(N - j) % N] += c
    return F


def _fold_selberg_numpy(D, eta, N, chunk=1 << 20):
    F = np.zeros(N, dtype=np.float64)
    F[0] += 2.0 * eta + 1.0 / (D + 1)
    for start in range(1, D + 1, chunk):
        k = np.arange(start, min(D + 1, start + chunk), dtype=np.int64)
        u = k / (D + 1)
        psi = np.pi * u * (1.0 - u) / np.tan(np.pi * u) + u
        ph = k * eta
        ang = 2.0 * np.pi * (ph - np.floor(ph))
        c = psi * np.sin(ang) / (np.pi * k) + (1.0 - u) * np.cos(ang) / (D + 1)
        j = k % N
        F += np.bincount(j, weights=c, minlength=N)
        F += np.bincount((N - j) % N, weights=c, minlength=N)
    return F


# ---------------------------------------------------------------------------
# per-residue sums of complex weights: out[c] = sum_{v = c mod d} w

def _residue_sums_loop(values, w_re, w_im, d):
    re = np.zeros(d, dtype=np.float64)
    im = np.zeros(d, dtype=np.float64)
    for i in range(values.shape[0]):
        c = values[i] % d
        re[c] += w_re[i]
        im[c] += w_im[i]
    return re, im


def _residue_sums_numpy(values, w_re, w_im, d):
    c = values % d
    return (np.bincount(c, weights=w_re, minlength=d),
            np.bincount(c, weights=w_im, minlength=d))


# ---------------------------------------------------------------------------
# direct cyclic convolution, normalized: out[t] = (1/N) sum_n f[n] g[t-n]

def _cyclic_convolve_loop(f, g):
    N = f.shape[0]
    out = np.zeros(N, dtype=np.float64)
    for n in range(N):
        fn = f[n]
        if fn == 0.0:
            continue
        for t in range(N):
            m = t - n
            if m < 0:
                m += N
            out[t] += fn * g[m]
    for t in range(N):
        out[t] /= N
    return out


def _cyclic_convolve_numpy(f, g):
    N = f.shape[0]
    full = np.convolve(f, g)
    out = full[:N].copy()
    out[: N - 1] += full[N:]
    return out / N


_sieve_segment_numba = _jit(_sieve_segment_loop)
_omega_spf_numba = _jit(_omega_spf_loop)
_first_triples_numba = _jit(_first_triples_loop)
_fold_selberg_numba = _jit(_fold_selberg_loop)
_residue_sums_numba = _jit(_residue_sums_loop)
_cyclic_convolve_numba = _jit(_cyclic_convolve_loop)

IMPLEMENTATIONS = {
    "sieve_segment": (_sieve_segment_numba, _sieve_segment_numpy),
    "omega_spf": (_omega_spf_numba, _omega_spf_numpy),
    "first_triples": (_first_triples_numba, _first_triples_numpy),
    "fold_selberg": (_fold_selberg_numba, _fold_selberg_numpy),
    "residue_sums": (_residue_sums_numba, _residue_sums_numpy),
    "cyclic_convolve": (_cyclic_convolve_numba, _cyclic_convolve_numpy),
}


def _pick(name):
    fast, slow = IMPLEMENTATIONS[name]
    return fast if USE_NUMBA else slow


def sieve_segment(lo: int, hi: int, base_primes: np.ndarray) -> np.ndarray:
    return _pick("sieve_segment")(np.int64(lo), np.int64(hi), base_primes)


def omega_spf(lo: int, hi: int, base_primes: np.ndarray):
    return _pick("omega_spf")(np.int64(lo), np.int64(hi), base_primes)


def first_triples(targets: np.ndarray, cprimes: np.ndarray, member: np.ndarray) -> np.ndarray:
    return _pick("first_triples")(targets.astype(np.int64), cprimes.astype(np.int64), member)


def fold_selberg(D: int, eta: float, N: int) -> np.ndarray:
    return _pick("fold_selberg")(int(D), float(eta), int(N))


def residue_sums(values, w_re, w_im, d: int):
    return _pick("residue_sums")(values, w_re, w_im, int(d))


def cyclic_convolve_direct(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    # np.convolve beats the compiled double loop at every size we use (see the benchmark)
    return _cyclic_convolve_numpy(np.ascontiguousarray(f, dtype=np.float64),
                                  np.ascontiguousarray(g, dtype=np.float64))


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
