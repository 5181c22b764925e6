"""Fourier analysis on Z/NZ and the transference decomposition.

Normalizations: ``fhat(xi) = E_n f(n) e(-xi n / N)`` and
``f*g(t) = E_n f(n) g(t - n)``, so that ``(f*g)^ = fhat * ghat``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Sequence

import numpy as np

from . import kernels
from .primes import ConstraintSpec, UNRESTRICTED, sieve_range, constrained_primes
from .trigpoly import BohrCutoff, bohr_cutoff

DIRECT_CROSSOVER = 4096
# transference defaults: how much of the large spectrum and degree to keep
MAX_OMEGA = 3
MAX_DEGREE = 10 ** 6
MIN_DELTA = 1e-6


@dataclass(frozen=True)
class CyclicFunction:
    N: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values)
        if v.dtype.kind not in "fc":
            v = v.astype(float)
        if v.ndim != 1 or v.size != self.N or self.N < 1:
            raise ValueError(f"need {self.N} values, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_values(cls, values) -> "CyclicFunction":
        v = np.asarray(values)
        return cls(v.size, v)

    @classmethod
    def constant(cls, N: int, c: float = 1.0) -> "CyclicFunction":
        return cls(N, np.full(N, float(c)))

    @classmethod
    def indicator(cls, N: int, lo: int, hi: int) -> "CyclicFunction":
        v = np.zeros(N)
        v[lo:hi] = 1.0
        return cls(N, v)

    def __call__(self, n):
        return self.values[np.asarray(n) % self.N]

    def __add__(self, other: "CyclicFunction") -> "CyclicFunction":
        _same_modulus(self, other)
        return CyclicFunction(self.N, self.values + other.values)

    def __sub__(self, other: "CyclicFunction") -> "CyclicFunction":
        _same_modulus(self, other)
        return CyclicFunction(self.N, self.values - other.values)

    def scale(self, c) -> "CyclicFunction":
        return CyclicFunction(self.N, self.values * c)

    @property
    def is_real(self) -> bool:
        return self.values.dtype.kind == "f"

    def l1(self) -> float:
        return float(np.mean(np.abs(self.values)))

    def mean(self):
        return self.values.mean()


def _same_modulus(*fs):
    Ns = {f.N for f in fs}
    if len(Ns) != 1:
        raise ValueError(f"modulus mismatch: {sorted(Ns)}")


def dft(f: CyclicFunction) -> CyclicFunction:
    return CyclicFunction(f.N, np.fft.fft(f.values) / f.N)


def idft(F: CyclicFunction, real: bool = False) -> CyclicFunction:
    v = np.fft.ifft(F.values) * F.N
    return CyclicFunction(F.N, v.real if real else v)


def dft_direct(f: CyclicFunction) -> np.ndarray:
    """O(N^2) summation; the reference for small N."""
    N = f.N
    n = np.arange(N)
    ph = np.outer(n, n) % N
    return np.exp(-2j * np.pi * ph / N) @ f.values / N


def _convolve_direct(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype.kind == "f" and b.dtype.kind == "f":
        return kernels.cyclic_convolve_direct(a, b)
    c = kernels.cyclic_convolve_direct
    ar, ai, br, bi = a.real, np.imag(a), b.real, np.imag(b)
    return (c(ar, br) - c(ai, bi)) + 1j * (c(ar, bi) + c(ai, br))


def _convolve_fft(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.fft.ifft(np.fft.fft(a) * np.fft.fft(b)) / a.shape[0]
    if a.dtype.kind == "f" and b.dtype.kind == "f":
        return out.real
    return out


def convolve(f: CyclicFunction, g: CyclicFunction, method: str = "auto") -> CyclicFunction:
    """Normalized cyclic convolution; direct below ``DIRECT_CROSSOVER``."""
    _same_modulus(f, g)
    if method == "auto":
        method = "direct" if f.N < DIRECT_CROSSOVER else "fft"
    if method == "direct":
        return CyclicFunction(f.N, _convolve_direct(f.values, g.values))
    if method == "fft":
        return CyclicFunction(f.N, _convolve_fft(f.values, g.values))
    raise ValueError(f"unknown method {method!r}")


def triple_at(f1: CyclicFunction, f2: CyclicFunction, f3: CyclicFunction, t: int = 0) -> float:
    """``f1*f2*f3(t)`` through the transforms."""
    _same_modulus(f1, f2, f3)
    N = f1.N
    prod = np.fft.fft(f1.values) * np.fft.fft(f2.values) * np.fft.fft(f3.values) / N ** 3
    xi = np.arange(N)
    val = np.sum(prod * np.exp(2j * np.pi * ((xi * t) % N) / N))
    return float(val.real)


def lp_fourier_norm(f: CyclicFunction, p: float) -> float:
    """``sum_xi |fhat(xi)|^p``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return float(np.sum(np.abs(np.fft.fft(f.values) / f.N) ** p))


def large_spectrum(f: CyclicFunction, eps: float) -> list[int]:
    """``{xi : |fhat(xi)| >= eps}`` together with 1."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    mag = np.abs(np.fft.fft(f.values) / f.N)
    out = set(np.flatnonzero(mag >= eps).tolist())
    out.add(1 % f.N)
    return sorted(out)


def transference_decompose(f: CyclicFunction, chi: BohrCutoff) -> tuple[CyclicFunction, CyclicFunction]:
    """``g = f*chi / ||chi||_1`` and ``h = f - g``."""
    if chi.N != f.N:
        raise ValueError(f"modulus mismatch: {f.N} vs {chi.N}")
    g = convolve(f, CyclicFunction(chi.N, np.asarray(chi.values))).scale(1 / chi.l1_norm)
    return g, f - g


def transference_parameters(delta: float, K: float) -> tuple[float, float]:
    """Cutoff width eta and spectrum threshold eps for given delta and K."""
    eta = min(0.049, delta / (1200 * K ** 0.4))
    eps = (delta ** 3 / 8000 / (4 * K)) ** 2
    return eta, eps


@dataclass
class TransferenceReport:
    N: int
    delta: float
    K: float
    eta: float
    eps: float
    Omega: list
    D: int
    D_nominal: int | None
    lhs: float
    rhs: float
    f1_average: float
    rich_bohr_min: float
    fourier_norms: list
    rich_bohr: bool
    f1_average_large: bool
    fourier_norm_bounded: bool
    # the cutoff actually used may be smaller than the one the argument asks for
    omega_truncated: bool
    D_override: bool
    main_term: float = float("nan")
    error_terms: list = field(default_factory=list)
    omega_defect: float = float("nan")
    measured: bool = True

    @property
    def hypotheses_hold(self) -> bool:
        return self.delta >= MIN_DELTA and self.rich_bohr and self.f1_average_large and self.fourier_norm_bounded

    @property
    def conclusion_holds(self) -> bool:
        return self.lhs >= self.rhs

    @property
    def violation(self) -> bool:
        return self.hypotheses_hold and not self.conclusion_holds

    @property
    def cutoff_faithful(self) -> bool:
        return not (self.omega_truncated or self.D_override)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(hypotheses_hold=self.hypotheses_hold, conclusion_holds=self.conclusion_holds,
                 violation=self.violation, cutoff_faithful=self.cutoff_faithful)
        return d


def _window(N: int, a: float, b: float, closed: bool) -> np.ndarray:
    lo = math.ceil(a * N - 1e-9)
    hi = math.floor(b * N + 1e-9) + 1 if closed else math.ceil(b * N - 1e-9)
    return np.arange(max(lo, 0), min(hi, N))


def f1_window_average(f1: CyclicFunction) -> float:
    """``(1/N) sum_{0.1N <= n <= 0.4N} f1(n)``."""
    idx = _window(f1.N, 0.1, 0.4, closed=True)
    return float(np.sum(f1.values[idx])) / f1.N


def _cutoff_for(f1: CyclicFunction, delta: float, K: float, max_omega: int, max_degree: int):
    eta, eps = transference_parameters(delta, K)
    mag = np.abs(np.fft.fft(f1.values) / f1.N)
    # exact zeros come out of the FFT as rounding noise; keep those out
    floor = max(eps, 1e-12 * float(mag.max(initial=0.0)))
    full = large_spectrum(f1, floor)
    one = 1 % f1.N
    if len(full) > max_omega:
        rest = sorted((x for x in full if x != one), key=lambda x: (-mag[x], x))
        Om = sorted([one] + rest[: max_omega - 1])
    else:
        Om = full
    from .trigpoly import nominal_degree
    try:
        Dp = nominal_degree(eta, len(Om))
    except OverflowError:
        Dp = None
    D = Dp if Dp is not None and Dp <= max_degree else max_degree
    chi = bohr_cutoff(f1.N, Om, eta, D=D, max_degree=max(max_degree, D))
    return chi, eta, eps, len(full) > len(Om)


def _rich_ratio(fs: Sequence[CyclicFunction], chi: BohrCutoff) -> float:
    N = chi.N
    ts = _window(N, 0.25, 0.5, closed=False)
    c = CyclicFunction(N, np.asarray(chi.values))
    worst = math.inf
    for f in fs:
        conv = convolve(f, c).values
        worst = min(worst, float(np.min(conv[ts])) / chi.l1_norm)
    return worst


def transference_check(f1: CyclicFunction, f2: CyclicFunction, f3: CyclicFunction,
                       delta: float | None = None, K: float | None = None,
                       max_omega: int = MAX_OMEGA, max_degree: int = MAX_DEGREE,
                       max_rounds: int = 12) -> TransferenceReport:
    """Measure the transference hypotheses and compare ``f1*f2*f3(N)`` with ``delta^3/200``.

    With ``delta=None`` the largest delta the inputs support is searched for:
    start from the window average of f1 and lower it to the observed minimum
    of ``f_i*chi(t)/||chi||_1`` over ``t in [N/4, N/2)`` until the cutoff
    built for that delta agrees.  ``K=None`` measures
    ``max(1, max_i sum |fhat_i|^{5/2})``.

    The cutoff keeps at most ``max_omega`` frequencies of the large spectrum
    (largest first, 1 always kept) and degree at most ``max_degree``; the
    report records when either cap was applied.
    """
    _same_modulus(f1, f2, f3)
    N = f1.N
    norms = [lp_fourier_norm(f, 2.5) for f in (f1, f2, f3)]
    measured = delta is None
    if K is None:
        K = max(1.0, max(norms))
    avg = f1_window_average(f1)
    if measured:
        d = avg
        chi, eta, eps, trunc = None, 0.0, 0.0, False
        for _ in range(max_rounds):
            if d < MIN_DELTA:
                break
            chi, eta, eps, trunc = _cutoff_for(f1, d, K, max_omega, max_degree)
            ratio = _rich_ratio((f2, f3), chi)
            if ratio >= d * (1 - 1e-12):
                break
            d = max(ratio, 0.0)
        delta = d
    if delta >= MIN_DELTA:
        if not measured:
            chi, eta, eps, trunc = _cutoff_for(f1, delta, K, max_omega, max_degree)
        ratio = _rich_ratio((f2, f3), chi)
    else:
        # no usable cutoff: the guarantee is withheld
        eta, eps = transference_parameters(max(delta, MIN_DELTA), K)
        chi, trunc, ratio = None, False, 0.0
    lhs = triple_at(f1, f2, f3, 0)
    rep = TransferenceReport(
        N=N, delta=float(delta), K=float(K), eta=eta, eps=eps,
        Omega=list(chi.Omega) if chi else [], D=chi.D if chi else 0,
        D_nominal=chi.D_nominal if chi else None,
        lhs=lhs, rhs=delta ** 3 / 200, f1_average=avg, rich_bohr_min=ratio,
        fourier_norms=norms,
        rich_bohr=bool(chi is not None and ratio >= delta * (1 - 1e-12)),
        f1_average_large=avg >= delta,
        fourier_norm_bounded=max(norms) <= K * (1 + 1e-12),
        omega_truncated=trunc, D_override=bool(chi is not None and chi.overridden),
        measured=measured,
    )
    if chi is not None:
        g2, h2 = transference_decompose(f2, chi)
        g3, h3 = transference_decompose(f3, chi)
        rep.main_term = triple_at(f1, g2, g3)
        rep.error_terms = [triple_at(f1, g2, h3), triple_at(f1, h2, g3), triple_at(f1, h2, h3)]
        spec = chi.spectrum()
        rep.omega_defect = float(max(abs(1 - spec[x] / chi.l1_norm) for x in chi.Omega))
    return rep


def wtricked_prime_function(N: int, W: int = 6, b: int = 1, window: tuple[float, float] = (0.25, 0.5),
                            spec: ConstraintSpec = UNRESTRICTED, X: int | None = None) -> CyclicFunction:
    """``(phi(W)/W) log(X) 1[Wn + b is a constrained prime]`` on a window of Z/NZ.

    ``X`` defaults to ``W N``, the size of the numbers involved.
    """
    if math.gcd(W, b) != 1:
        raise ValueError(f"b={b} not coprime to W={W}")
    phi = sum(1 for r in range(1, W + 1) if math.gcd(r, W) == 1)
    X = X or W * N
    idx = _window(N, window[0], window[1], closed=False)
    hi = W * N + b + 1
    table = sieve_range(2, hi + spec.margin + 1)
    ps = constrained_primes(table, spec, hi=hi)
    member = np.zeros(hi + 1, dtype=bool)
    member[ps] = True
    v = np.zeros(N)
    v[idx] = member[W * idx + b] * (phi / W) * math.log(X)
    return CyclicFunction(N, v)
