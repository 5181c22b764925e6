"""Linear sieve functions F, f and the numerical endgame of Chen's weighted sieve."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson, dblquad, quad, simpson
from scipy.interpolate import CubicSpline

EULER_GAMMA = 0.57721566490153286060651209008240
E_GAMMA = math.exp(EULER_GAMMA)
MAX_STEP = 1e-3
INTEGRAND_CAP = 1e3


@dataclass(frozen=True)
class SieveFunctionTable:
    """F and f tabulated on ``s = 1 + j * step``.

    Off-grid values come from cubic splines fitted separately on each unit
    interval, since derivatives jump at the integers.
    """

    grid: np.ndarray = field(repr=False)
    F_values: np.ndarray = field(repr=False)
    f_values: np.ndarray = field(repr=False)
    step: float
    gamma: float = EULER_GAMMA

    def __post_init__(self):
        for a in (self.grid, self.F_values, self.f_values):
            a.setflags(write=False)

    @property
    def s_max(self) -> float:
        return float(self.grid[-1])

    @property
    def per_unit(self) -> int:
        return int(round(1 / self.step))

    def _splines(self, which: str):
        cache = self.__dict__.setdefault("_spl", {})
        if which not in cache:
            vals = self.F_values if which == "F" else self.f_values
            m = self.per_unit
            cache[which] = [CubicSpline(self.grid[k * m : (k + 1) * m + 1], vals[k * m : (k + 1) * m + 1])
                            for k in range((self.grid.size - 1) // m)]
        return cache[which]

    def _eval(self, which: str, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < 1 - 1e-12) or np.any(s > self.s_max + 1e-12):
            raise ValueError(f"s outside tabulated range [1, {self.s_max}]")
        spl = self._splines(which)
        k = np.clip(np.floor(s - 1).astype(int), 0, len(spl) - 1)
        out = np.empty(s.shape)
        for i in np.unique(k):
            sel = k == i
            out[sel] = spl[i](s[sel])
        return out if out.ndim else float(out)

    def F(self, s):
        return self._eval("F", s)

    def f(self, s):
        return self._eval("f", s)

    def rows(self):
        for s, F, f in zip(self.grid.tolist(), self.F_values.tolist(), self.f_values.tolist()):
            yield s, F, f


def build_sieve_table(s_max: float = 5.0, step: float = 1e-4) -> SieveFunctionTable:
    """Integrate the delay system one unit interval at a time.

    ``sF = 2e^gamma`` on [1, 3] and ``sf = 0`` on [1, 2]; beyond that
    ``sF(s) = 2e^gamma + int_2^{s-1} f`` and ``sf(s) = int_1^{s-1} F``, where
    the integrals only involve the previous unit interval.  Each cumulative
    integral restarts at an integer, where the integrands have kinks.
    """
    if s_max < 3:
        raise ValueError("s_max must be >= 3")
    if not 0 < step <= MAX_STEP:
        raise ValueError(f"step must lie in (0, {MAX_STEP}]")
    m = round(1 / step)
    if abs(m * step - 1) > 1e-9:
        raise ValueError("1/step must be an integer")
    units = math.ceil(s_max - 1 - 1e-12)
    n = units * m + 1
    s = 1 + np.arange(n) / m
    F = np.empty(n)
    f = np.empty(n)
    head = s <= 3
    F[head] = 2 * E_GAMMA / s[head]
    f[s <= 2] = 0.0
    # running integrals int_1^t F and int_2^t f at integer t
    IF_at, If_at = {1: 0.0}, {2: 0.0}
    for k in range(1, units):
        # values on [k, k+1] determine both functions on [k+1, k+2]
        seg = slice((k - 1) * m, k * m + 1)
        cur = slice(k * m, (k + 1) * m + 1)
        t, sc = s[seg], s[cur]
        cumF = IF_at[k] + cumulative_simpson(F[seg], x=t, initial=0.0)
        IF_at[k + 1] = float(cumF[-1])
        f[cur] = cumF / sc
        if k >= 2:
            cumf = If_at[k] + cumulative_simpson(f[seg], x=t, initial=0.0)
            If_at[k + 1] = float(cumf[-1])
            F[cur] = (2 * E_GAMMA + cumf) / sc
    return SieveFunctionTable(s, F, f, 1 / m)


def _check_integrand(a1_lo, a1_hi, a2_lo, a2_hi):
    # the integrand is largest at the smallest alpha_1, alpha_2 and largest sum
    worst = 0.0
    for a1 in (a1_lo, a1_hi):
        lo, hi = a2_lo(a1), max(a2_lo(a1), a2_hi(a1))
        for a2 in (lo, hi):
            rest = 1 - a1 - a2
            if a1 <= 0 or a2 <= 0 or rest <= 0:
                raise FloatingPointError("density integrand singular on the domain")
            worst = max(worst, 1 / (a1 * a2 * rest))
    if worst > INTEGRAND_CAP:
        raise FloatingPointError(f"density integrand reaches {worst:.3g} > {INTEGRAND_CAP}")


def _domain(j: int, eps: float):
    if j == 1:
        return 0.1, 1 / 3 - eps, (lambda a1: 1 / 3 - eps), (lambda a1: (1 - a1) / 2)
    if j == 2:
        return 1 / 3 - eps, 1 / 3, (lambda a1: a1), (lambda a1: (1 - a1) / 2)
    raise ValueError("j must be 1 or 2")


def density_B(j: int, eps: float, with_error: bool = False):
    """``int int da2 da1 / (a1 a2 (1 - a1 - a2))`` over the B_j domain, by 2-D quadrature."""
    if not 0 <= eps < 0.1:
        raise ValueError("eps must lie in [0, 0.1)")
    a, b, lo, hi = _domain(j, eps)
    if b <= a:
        return (0.0, 0.0) if with_error else 0.0
    _check_integrand(a, b, lo, hi)
    val, err = dblquad(lambda a2, a1: 1 / (a1 * a2 * (1 - a1 - a2)), a, b,
                       lo, lambda a1: max(lo(a1), hi(a1)), epsabs=1e-11, epsrel=1e-11)
    return (val, err) if with_error else val


def density_B_inner_closed(j: int, eps: float) -> float:
    """The same integral with the inner variable integrated exactly.

    With ``c = 1 - a1`` the inner integral from lo to c/2 is ``ln((c - lo)/lo) / c``.
    """
    a, b, lo, _ = _domain(j, eps)
    if b <= a:
        return 0.0

    def inner(a1):
        c = 1 - a1
        l = lo(a1)
        return math.log((c - l) / l) / (c * a1) if l < c / 2 else 0.0

    return quad(inner, a, b, epsabs=1e-13, epsrel=1e-13)[0]


def _delay_integral(table: SieveFunctionTable, eps: float) -> float:
    """``int_{1/10}^{1/3-eps} F(5 - 10 eps - 10 t) dt / t`` via ``u = 5 - 10 eps - 10 t``.

    That gives ``int_{5/3}^{4 - 10 eps} F(u) du / (c - u)``, c = 5 - 10 eps.  On
    [5/3, 3] F = 2e^gamma/u and the piece is exact; the rest is Simpson on
    the table's own step.
    """
    c = 5 - 10 * eps
    top = 4 - 10 * eps
    mid = min(3.0, top)
    exact = (2 * E_GAMMA / c) * (math.log(mid / (c - mid)) - math.log((5 / 3) / (c - 5 / 3)))
    if top <= 3:
        return exact
    n = max(2, math.ceil((top - 3) / table.step))
    n += n % 2
    u = np.linspace(3.0, top, n + 1)
    return exact + float(simpson(table.F(u) / (c - u), x=u))


def _chen_value(table: SieveFunctionTable, eps: float) -> float:
    b1 = density_B(1, eps)
    b2 = density_B(2, eps)
    return (float(table.f(5 - 10 * eps)) - 0.5 * _delay_integral(table, eps)
            - 0.6 * float(table.F(3 - 6 * eps)) * (0.5 * b1 + b2))


@dataclass(frozen=True)
class ChenConstant:
    value: float
    error_estimate: float
    coarse: float
    fine: float
    extrapolated: float
    eps: float
    step: float
    delta_B1: float
    delta_B2: float

    def to_dict(self) -> dict:
        return dict(chen_constant=self.value, error_estimate=self.error_estimate,
                    coarse=self.coarse, fine=self.fine, extrapolated=self.extrapolated,
                    eps=self.eps, step=self.step, delta_B1=self.delta_B1, delta_B2=self.delta_B2)


def chen_constant(eps: float = 0.0, step: float = 1e-4, table: SieveFunctionTable | None = None) -> ChenConstant:
    """``f(5-10e) - 1/2 int F(5-10e-10t) dt/t - 3/5 F(3-6e) (delta(B1)/2 + delta(B2))``.

    Evaluated with tables at ``step`` and ``step/2``; the error estimate is
    the Richardson bound ``|fine - coarse| * 16/15``.
    """
    if not 0 <= eps <= 0.05:
        raise ValueError("eps must lie in [0, 0.05]")
    if table is None:
        table = build_sieve_table(5.0, step)
    elif table.s_max < 5 - 1e-12:
        raise ValueError("table must cover s in [1, 5]")
    step = table.step
    fine_table = build_sieve_table(5.0, step / 2)
    coarse = _chen_value(table, eps)
    fine = _chen_value(fine_table, eps)
    extra = fine + (fine - coarse) / 15
    return ChenConstant(value=coarse, error_estimate=abs(fine - coarse) * 16 / 15,
                        coarse=coarse, fine=fine, extrapolated=extra, eps=eps, step=step,
                        delta_B1=density_B(1, eps), delta_B2=density_B(2, eps))
