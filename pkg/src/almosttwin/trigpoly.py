"""Trigonometric polynomials behind the smooth Bohr cutoff.

Conventions: ``e(x) = exp(2 pi i x)``; a polynomial is ``sum_k c_k e(k x)``.
The sawtooth is ``s(x) = {x} - 1/2`` off the integers and 0 on them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels

# evaluation cost guard for folding a degree-D majorant modulo N
MAX_FOLD_DEGREE = 2 * 10 ** 8
# D must stay a machine integer
MAX_D = (1 << 63) - 1


def e(x):
    return np.exp(2j * np.pi * np.asarray(x, dtype=float))


def sawtooth(x):
    x = np.asarray(x, dtype=float)
    fr = x - np.floor(x)
    return np.where(fr == 0.0, 0.0, fr - 0.5)


def torus_dist(x):
    """Distance to the nearest integer."""
    x = np.asarray(x, dtype=float)
    return np.abs(x - np.round(x))


@dataclass(frozen=True)
class TrigPoly:
    """``sum_{|k| <= bound} c_k e(kx)`` with ``coeffs[k + bound] = c_k``."""

    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 == 0:
            raise ValueError("coefficient array must have odd length 2*bound+1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_dict(cls, coeffs: dict) -> "TrigPoly":
        bound = max((abs(k) for k in coeffs), default=0)
        arr = np.zeros(2 * bound + 1, dtype=complex)
        for k, v in coeffs.items():
            arr[k + bound] += complex(v)
        return cls(arr)

    @property
    def bound(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(np.abs(self.coeffs) > 0)
        if nz.size == 0:
            return 0
        return int(np.max(np.abs(nz - self.bound)))

    def __getitem__(self, k: int) -> complex:
        if abs(k) > self.bound:
            return 0j
        return complex(self.coeffs[k + self.bound])

    def items(self):
        b = self.bound
        for i, c in enumerate(self.coeffs):
            if c != 0:
                yield i - b, complex(c)

    def is_real_valued(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1])), initial=0.0) <= tol)

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x, chunk: int = 4096):
        """Direct summation; real part returned for real-valued polynomials."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        ks = np.arange(-self.bound, self.bound + 1)
        out = np.empty(x.size, dtype=complex)
        for s in range(0, x.size, chunk):
            xs = x[s : s + chunk]
            # reduce k*x mod 1 before exponentiating to keep phases accurate
            ph = np.outer(xs, ks)
            ph -= np.floor(ph)
            out[s : s + chunk] = np.exp(2j * np.pi * ph) @ self.coeffs
        return out.real if self.is_real_valued() else out

    def _padded(self, bound: int) -> np.ndarray:
        pad = bound - self.bound
        return np.pad(self.coeffs, (pad, pad))

    def __add__(self, other):
        if not isinstance(other, TrigPoly):
            return self + TrigPoly(np.array([complex(other)]))
        b = max(self.bound, other.bound)
        return TrigPoly(self._padded(b) + other._padded(b))

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            return TrigPoly(np.convolve(self.coeffs, other.coeffs))
        return TrigPoly(self.coeffs * complex(other))

    __rmul__ = __mul__

    def shift(self, a: float) -> "TrigPoly":
        """``x -> P(x - a)``."""
        ks = np.arange(-self.bound, self.bound + 1)
        return TrigPoly(self.coeffs * e(-ks * a))

    def reflect(self) -> "TrigPoly":
        """``x -> P(-x)``."""
        return TrigPoly(self.coeffs[::-1])

    def fold(self, N: int) -> np.ndarray:
        """Coefficients summed over residue classes of k mod N."""
        ks = np.arange(-self.bound, self.bound + 1) % N
        return (np.bincount(ks, weights=self.coeffs.real, minlength=N)
                + 1j * np.bincount(ks, weights=self.coeffs.imag, minlength=N))


def fejer_exact(K: int) -> dict[int, Fraction]:
    if K < 1:
        raise ValueError("Fejer kernel needs K >= 1")
    return {k: Fraction(K - abs(k), K) for k in range(-(K - 1), K)}


def fejer(K: int) -> TrigPoly:
    """Fejer kernel of order K (degree K - 1)."""
    return TrigPoly.from_dict({k: float(v) for k, v in fejer_exact(K).items()})


def fejer_closed(K: int, x):
    """``(1/K) (sin(pi K x) / sin(pi x))^2``, equal to K at the integers."""
    x = np.asarray(x, dtype=float)
    s = np.sin(np.pi * x)
    small = np.abs(s) < 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.sin(np.pi * K * x) ** 2 / (K * s * s)
    return np.where(small, float(K), val)


def _sin_poly(m: int) -> TrigPoly:
    # sin(2 pi m x) = (e(mx) - e(-mx)) / 2i
    return TrigPoly.from_dict({m: 1 / 2j, -m: -1 / 2j})


def vaaler_from_definition(D: int) -> TrigPoly:
    """Vaaler's polynomial assembled term by term from shifted Fejer kernels."""
    if D < 1:
        raise ValueError("Vaaler polynomial needs D >= 1")
    F = fejer(D + 1)
    b = F.bound
    ks = np.arange(-b, b + 1)
    shifts = np.arange(1, D + 1) / (D + 1)
    weights = (shifts - 0.5) / (D + 1)
    phase = np.exp(-2j * np.pi * np.outer(shifts, ks))
    acc = TrigPoly(F.coeffs * (weights @ phase))
    acc = acc + _sin_poly(D + 1) * (1 / (2 * np.pi * (D + 1)))
    acc = acc + (F * _sin_poly(1)) * (-1 / (2 * np.pi))
    # the degree D+1 terms cancel exactly; drop the float residue
    return TrigPoly(acc.coeffs[1:-1])


def _psi(u):
    u = np.asarray(u, dtype=float)
    return np.pi * u * (1 - u) / np.tan(np.pi * u) + u


def vaaler_coefficients(D: int) -> np.ndarray:
    """Closed-form coefficients ``c_k = -psi(k/(D+1)) / (2 pi i k)`` for 1 <= k <= D."""
    k = np.arange(1, D + 1)
    return -_psi(k / (D + 1)) / (2j * np.pi * k)


def vaaler(D: int) -> TrigPoly:
    """Vaaler's degree-D approximation to the sawtooth."""
    if D < 1:
        raise ValueError("Vaaler polynomial needs D >= 1")
    c = vaaler_coefficients(D)
    return TrigPoly(np.concatenate([-c[::-1], [0j], c]))


def _check_eta(eta: float):
    if not 0 < eta <= 0.5:
        raise ValueError(f"eta must lie in (0, 1/2], got {eta}")


def selberg_majorant(D: int, eta: float) -> TrigPoly:
    """Selberg's majorant of the indicator of ``||x|| <= eta``."""
    if D < 1:
        raise ValueError("Selberg majorant needs D >= 1")
    _check_eta(eta)
    V = vaaler(D)
    F = fejer(D + 1)
    return (2 * eta + V.shift(eta) + V.reflect().shift(-eta)
            + (F.shift(eta) + F.reflect().shift(-eta)) * (1 / (2 * D + 2)))


def selberg_coefficient_bound(D: int, eta: float, k) -> np.ndarray:
    k = np.abs(np.asarray(k, dtype=float))
    with np.errstate(divide="ignore"):
        tail = np.where(k == 0, 2 * eta, np.minimum(2 * eta, 1 / np.where(k == 0, 1, k)))
    return 1 / (D + 1) + tail


def selberg_on_grid(D: int, eta: float, N: int) -> np.ndarray:
    """``S+(r/N)`` for r = 0..N-1, from the coefficients folded mod N."""
    F = kernels.fold_selberg(D, eta, N)
    return (np.fft.ifft(F) * N).real


def nominal_degree(eta: float, omega_size: int) -> int:
    """``ceil(4/eta) ** (2 |Omega|)``."""
    _check_eta(eta)
    base = math.ceil(Fraction(4) / Fraction(eta).limit_denominator(10 ** 12))
    return base ** (2 * omega_size)


def _normalize_omega(N: int, Omega: Sequence[int]) -> tuple[int, ...]:
    return tuple(sorted({int(x) % N for x in Omega}))


def bohr_distances(N: int, Omega: Sequence[int]) -> np.ndarray:
    """``max_xi ||xi n / N||`` scaled by N, for every n (exact integers)."""
    n = np.arange(N, dtype=np.int64)
    worst = np.zeros(N, dtype=np.int64)
    for xi in _normalize_omega(N, Omega):
        r = (xi * n) % N
        worst = np.maximum(worst, np.minimum(r, N - r))
    return worst


def bohr_members(N: int, Omega: Sequence[int], eta: float) -> np.ndarray:
    """``{n in Z/NZ : ||xi n / N|| <= eta for all xi in Omega}``."""
    if N < 1:
        raise ValueError("N must be positive")
    return np.flatnonzero(bohr_distances(N, Omega) <= eta * N + 1e-9)


@dataclass(frozen=True)
class BohrCutoff:
    """Product of Selberg majorants ``chi(n) = prod_xi S+(xi n / N)`` on Z/NZ.

    ``D`` is the degree in use; ``D_nominal = ceil(4/eta)^(2|Omega|)``.  When
    they differ the off-Bohr bound weakens to ``2^|Omega| / (eta^2 D^2)``.
    """

    N: int
    Omega: tuple[int, ...]
    eta: float
    D: int
    D_nominal: int | None
    factor_values: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    @property
    def overridden(self) -> bool:
        return self.D_nominal is None or self.D != self.D_nominal

    @property
    def l1_norm(self) -> float:
        return float(np.mean(np.abs(self.values)))

    @property
    def l1_lower_bound(self) -> float:
        return (self.eta / 2) ** len(self.Omega)

    @property
    def off_bohr_bound(self) -> float:
        k = len(self.Omega)
        if not self.overridden:
            return (self.eta ** 2 / 8) ** k
        return 2.0 ** k / (self.eta ** 2 * float(self.D) ** 2)

    def __call__(self, n):
        return self.values[np.asarray(n, dtype=np.int64) % self.N]

    def members(self, eta: float | None = None) -> np.ndarray:
        return bohr_members(self.N, self.Omega, self.eta if eta is None else eta)

    def max_off_bohr(self) -> float:
        """``max |chi(n)|`` over n outside Bohr(Omega, 2 eta); 0 if there is none."""
        outside = bohr_distances(self.N, self.Omega) > 2 * self.eta * self.N + 1e-9
        return float(np.max(np.abs(self.values[outside]), initial=0.0))

    def spectrum(self) -> np.ndarray:
        """Normalized DFT of the values: ``E_n chi(n) e(-r n / N)``."""
        return np.fft.fft(self.values) / self.N

    def spectrum_by_product(self) -> np.ndarray:
        """The same coefficients from the product of the factor expansions.

        Each factor contributes its folded coefficients scattered to
        ``xi * j mod N``; the product of functions becomes a cyclic
        convolution of coefficient arrays, done directly.
        """
        N = self.N
        F = np.fft.fft(self.factor_values) / N
        j = np.arange(N, dtype=np.int64)
        acc = np.zeros(N, dtype=complex)
        acc[0] = 1.0
        for xi in self.Omega:
            G = (np.bincount((xi * j) % N, weights=F.real, minlength=N)
                 + 1j * np.bincount((xi * j) % N, weights=F.imag, minlength=N))
            re = kernels.cyclic_convolve_direct(acc.real, G.real) - kernels.cyclic_convolve_direct(acc.imag, G.imag)
            im = kernels.cyclic_convolve_direct(acc.real, G.imag) + kernels.cyclic_convolve_direct(acc.imag, G.real)
            acc = (re + 1j * im) * N
        return acc

    def factor(self) -> TrigPoly:
        """The Selberg factor as an explicit polynomial (small D only)."""
        if self.D > 10 ** 5:
            raise ValueError(f"D={self.D} too large to materialize")
        return selberg_majorant(self.D, self.eta)

    def as_exponential_combination(self, tol: float = 1e-14) -> "ExponentialCombination":
        spec = self.spectrum()
        keep = np.flatnonzero(np.abs(spec) > tol)
        terms = tuple((complex(spec[r]), r / self.N) for r in keep)
        M = max(len(terms), math.ceil(max((abs(b) for b, _ in terms), default=1.0)))
        return ExponentialCombination(terms, M)

    def summary(self) -> dict:
        return {
            "N": self.N,
            "Omega": list(self.Omega),
            "eta": self.eta,
            "D": self.D,
            "D_nominal": self.D_nominal,
            "D_overridden": self.overridden,
            "members": self.members().tolist(),
            "l1_norm": self.l1_norm,
            "l1_lower_bound": self.l1_lower_bound,
            "max_off_bohr": self.max_off_bohr(),
            "off_bohr_bound": self.off_bohr_bound,
        }


def bohr_cutoff(N: int, Omega: Sequence[int], eta: float, D: int | None = None,
                max_degree: int = MAX_FOLD_DEGREE) -> BohrCutoff:
    """Smooth Bohr cutoff for ``Omega`` at width ``eta`` on Z/NZ.

    ``D=None`` uses ``ceil(4/eta)^(2|Omega|)``.  An explicit ``D`` overrides it
    (recorded on the result).  Degrees above ``max_degree`` are refused since
    folding costs O(D).
    """
    _check_eta(eta)
    if N < 1:
        raise ValueError("N must be positive")
    Om = _normalize_omega(N, Omega)
    try:
        D_nominal = nominal_degree(eta, len(Om))
    except OverflowError:
        D_nominal = None
    if D_nominal is not None and D_nominal > MAX_D:
        D_nominal = None
    if D is None:
        if D_nominal is None:
            raise OverflowError(f"ceil(4/eta)^(2*{len(Om)}) overflows; pass an explicit D")
        D = D_nominal
    if D < 1:
        raise ValueError("D must be positive")
    if D > max_degree:
        raise ValueError(f"D={D} above the folding budget {max_degree}; pass a smaller D")
    fv = selberg_on_grid(D, eta, N)
    n = np.arange(N, dtype=np.int64)
    vals = np.ones(N)
    for xi in Om:
        vals = vals * fv[(xi * n) % N]
    fv.setflags(write=False)
    vals.setflags(write=False)
    return BohrCutoff(N, Om, float(eta), int(D), D_nominal, fv, vals)


@dataclass(frozen=True)
class ExponentialCombination:
    """``sum_i b_i e(alpha_i n)`` with at most M terms and ``|b_i| <= M``."""

    terms: tuple
    M: int

    def __post_init__(self):
        if len(self.terms) > self.M:
            raise ValueError(f"{len(self.terms)} terms exceed complexity bound {self.M}")
        for b, _ in self.terms:
            if abs(b) > self.M + 1e-12:
                raise ValueError(f"coefficient {b} exceeds complexity bound {self.M}")

    def __call__(self, n):
        n = np.atleast_1d(np.asarray(n, dtype=np.int64))
        out = np.zeros(n.size, dtype=complex)
        for b, a in self.terms:
            ph = np.asarray(n, dtype=float) * a
            out += b * e(ph - np.floor(ph))
        return out

    @property
    def phases(self) -> list[float]:
        return [a for _, a in self.terms]


def _convergents(x: Fraction):
    """Continued-fraction convergents of a nonnegative rational."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    num, den = x.numerator, x.denominator
    while den:
        a, r = divmod(num, den)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        yield p1, q1
        num, den = den, r


def dirichlet_approx(alpha, q_max: int) -> tuple[int, int, float]:
    """``alpha = a/q + beta`` (mod 1) with ``q <= q_max`` and ``|beta| <= 1/(q q_max)``.

    Uses the last continued-fraction convergent with denominator at most
    q_max.  ``alpha`` may be a float or a Fraction; floats are expanded
    exactly.  Returns ``0 <= a < q`` and ``beta`` reduced to ``(-1/2, 1/2]``.
    """
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    x = Fraction(alpha)
    x -= math.floor(x)
    p, q = 0, 1
    for pn, qn in _convergents(x):
        if qn > q_max:
            break
        p, q = pn, qn
    beta = x - Fraction(p, q)
    beta -= round(beta)
    return p % q, q, float(beta)


class DegenerateRegime(ValueError):
    """N is too small for the factorization's stated parameter ranges."""


@dataclass(frozen=True)
class SpectrumFactorization:
    a: tuple[int, ...]
    q: tuple[int, ...]
    beta: tuple[float, ...]
    Q: int
    iterations: int
    A: float
    B: float
    log_log_N: float
    degenerate: bool

    def dichotomy_holds(self) -> bool:
        thr = self.A * self.log_log_N
        for q in self.q:
            if self.Q % q == 0:
                continue
            if not math.log(q // math.gcd(q, self.Q * self.Q)) > thr:
                return False
        return True

    def Q_within_bound(self) -> bool:
        return math.log(self.Q) <= self.B * self.log_log_N + 1e-12


def spectrum_factorize(phases: Sequence, W: int, N: int, A: float,
                       allow_degenerate: bool = False) -> SpectrumFactorization:
    """Write each phase as ``W a_i/q_i + beta_i`` and build the modulus Q.

    Each ``alpha_i / W`` is approximated with denominators up to
    ``N / (log N)^(100 B)``, ``B = A (3M)^M``.  Then Q_0 = 1 and Q_{i+1} is
    the product of the distinct q with ``q / (q, Q_i^2) <= (log N)^A``,
    iterated to its fixed point; afterwards every q_i divides Q or has
    ``q_i / (q_i, Q^2) > (log N)^A``.
    """
    M = len(phases)
    if M == 0:
        raise ValueError("need at least one phase")
    if W < 1:
        raise ValueError("W must be positive")
    B = A * (3 * M) ** M
    logN = math.log(N)
    if logN <= 1:
        raise DegenerateRegime(f"log N = {logN:.3g} <= 1")
    LL = math.log(logN)
    degenerate = 100 * B * LL >= logN
    if degenerate and not allow_degenerate:
        raise DegenerateRegime(
            f"(log N)^(100B) >= N at log N = {logN:.4g}, B={B}: need log N > {100 * B * LL:.4g}")
    with localcontext() as ctx:
        ctx.prec = 60
        q_max = int(Decimal(N) / (Decimal(logN) ** Decimal(100 * B)))
    q_max = max(q_max, 1)
    aa, qq, bb = [], [], []
    for alpha in phases:
        x = Fraction(alpha)
        a, q, _ = dirichlet_approx(x / W, q_max)
        beta = x - W * Fraction(a, q)
        beta -= round(beta)
        aa.append(a)
        qq.append(q)
        bb.append(float(beta))
    thr = A * LL
    distinct = sorted(set(qq))
    Q, it = 1, 0
    while True:
        it += 1
        nxt = 1
        for q in distinct:
            if math.log(q // math.gcd(q, Q * Q)) <= thr:
                nxt *= q
        if nxt == Q:
            break
        Q = nxt
    return SpectrumFactorization(tuple(aa), tuple(qq), tuple(bb), Q, it, A, B, LL, degenerate)
