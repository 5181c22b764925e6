"""The acceptance suite: eleven end-to-end checks with their tolerances.

Each check returns a ``CriterionResult``; ``quick=True`` shrinks the scale
for smoke runs from the command line.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import arith, cyclic, expsums, goldbach, sievefn, trigpoly
from .primes import ConstraintSpec, UNRESTRICTED, satisfies, sieve_range

TWIN_ORACLE = 1.320324
# degree budget for the exact cutoff in the Bohr-cutoff check
EXACT_D_CAP = 25_000_000


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        brief = ", ".join(f"{k}={_fmt(v)}" for k, v in self.detail.items() if not isinstance(v, (list, dict)))
        return f"[{tag}] {self.number:2d} {self.name}: {brief} ({self.seconds:.1f}s)"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _timed(number: int, name: str, fn, *args) -> CriterionResult:
    t = time.perf_counter()
    passed, detail = fn(*args)
    return CriterionResult(number, name, bool(passed), detail, time.perf_counter() - t)


def chen_positivity(quick: bool = False):
    c = sievefn.chen_constant(0.0, step=1e-4)
    agree = abs(c.coarse - c.fine) <= 1e-6 and abs(c.extrapolated - c.fine) <= 1e-6
    return c.value > 0 and agree, {"value": c.value, "fine": c.fine, "error_estimate": c.error_estimate,
                                   "delta_B1": c.delta_B1}


def sieve_base_ranges(quick: bool = False):
    t = sievefn.build_sieve_table(5.0, 1e-4)
    e1 = abs(float(t.F(2.0)) - sievefn.E_GAMMA)
    e2 = abs(float(t.f(3.0)) - 2 * sievefn.E_GAMMA * math.log(2) / 3)
    return e1 <= 1e-8 and e2 <= 1e-6, {"F2_error": e1, "f3_error": e2}


def _bohr_instances(count: int, seed: int):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        N = int(rng.integers(10, 5001))
        k = int(rng.integers(1, 4))
        eta = float(rng.uniform(0.05, 0.25))
        if trigpoly.nominal_degree(eta, k) > EXACT_D_CAP:
            continue
        Om = sorted(set(rng.integers(0, N, size=k).tolist()))
        out.append((N, Om, eta))
    return out


def bohr_cutoff_bounds(quick: bool = False, seed: int = 20240601):
    bad = []
    worst_l1, worst_off = math.inf, 0.0
    insts = _bohr_instances(40 if quick else 200, seed)
    for N, Om, eta in insts:
        chi = trigpoly.bohr_cutoff(N, Om, eta, max_degree=EXACT_D_CAP)
        k = len(chi.Omega)
        l1_ratio = chi.l1_norm / (eta / 2) ** k
        off_ratio = chi.max_off_bohr() / (eta ** 2 / 8) ** k
        worst_l1 = min(worst_l1, l1_ratio)
        worst_off = max(worst_off, off_ratio)
        if l1_ratio < 1 or off_ratio > 1 or chi.values.min() < -1e-12:
            bad.append((N, Om, eta))
    sizes = [len(set(o)) for _, o, _ in insts]
    return not bad, {"instances": len(insts), "violations": len(bad),
                     "min_l1_over_bound": worst_l1, "max_off_over_bound": worst_off,
                     "omega3_instances": sizes.count(3)}


def majorant_grid(quick: bool = False):
    x = np.arange(100_000) / 100_000
    s = trigpoly.sawtooth(x)
    worst_maj, worst_vaaler = math.inf, -math.inf
    for D, eta in [(8, 0.1), (20, 0.1), (50, 0.05)]:
        S = trigpoly.selberg_majorant(D, eta)
        ind = (trigpoly.torus_dist(x) <= eta).astype(float)
        worst_maj = min(worst_maj, float(np.min(S(x) - ind)))
        V = trigpoly.vaaler(D)
        gap = np.abs(V(x) - s) - trigpoly.fejer_closed(D + 1, x) / (2 * D + 2)
        worst_vaaler = max(worst_vaaler, float(gap.max()))
    return worst_maj >= -1e-9 and worst_vaaler <= 1e-9, {"min_majorant_gap": worst_maj,
                                                         "max_vaaler_excess": worst_vaaler}


def smooth_dense(N: int, rng, lo: float, hi: float) -> cyclic.CyclicFunction:
    """Random set of density ~1/2 smoothed by a moving average, on a window."""
    width = max(8, N // 100)
    raw = (rng.random(N + width) < rng.uniform(0.3, 0.8)).astype(float)
    sm = np.convolve(raw, np.ones(width) / width, mode="valid")[:N]
    v = np.zeros(N)
    a, b = int(math.ceil(lo * N)), int(math.ceil(hi * N))
    v[a:b] = sm[a:b]
    return cyclic.CyclicFunction(N, v)


def _family(kind: str, N: int, rng):
    if kind == "smooth":
        return (smooth_dense(N, rng, 0.25, 0.5), smooth_dense(N, rng, 0.25, 0.5),
                smooth_dense(N, rng, 0.25, 0.5))
    if kind == "primes":
        W = 6 if rng.random() < 0.5 else 30
        bs = arith.allowed_residues(W).tolist()
        f = lambda win: cyclic.wtricked_prime_function(N, W, int(rng.choice(bs)), win)
        return f((0.2, 0.4)), f((0.25, 0.5)), f((0.25, 0.5))
    # plain window indicators of random height
    h = rng.uniform(0.2, 1.0, size=3)
    return tuple(cyclic.CyclicFunction.indicator(N, N // 4, N // 2).scale(float(c)) for c in h)


def transference_suite(quick: bool = False, seed: int = 7):
    rng = np.random.default_rng(seed)
    n_inst = 20 if quick else 100
    kinds = rng.choice(["smooth", "primes", "window"], size=n_inst, p=[0.6, 0.2, 0.2])
    flagged = violations = 0
    min_margin = math.inf
    for kind in kinds:
        N = int(rng.integers(1000, 4001 if quick else 20001))
        rep = cyclic.transference_check(*_family(str(kind), N, rng))
        if rep.hypotheses_hold:
            flagged += 1
            min_margin = min(min_margin, rep.lhs / rep.rhs)
            violations += rep.violation
    need = 6 if quick else 30
    return violations == 0 and flagged >= need, {"instances": n_inst, "all_flags": flagged,
                                                 "violations": violations, "min_lhs_over_rhs": min_margin}


def chen_scan(quick: bool = False):
    hi = 20_000 if quick else 100_000
    rep = goldbach.scan(9, hi, ConstraintSpec("chen"))
    detail = {"targets": rep.n_targets, "missing": len(rep.missing), "exceptions": rep.missing}
    if not quick:
        ext = goldbach.scan(hi + 1, 1_000_000, ConstraintSpec("chen"))
        detail["extended_to_1e6_missing"] = len(ext.missing)
    return not rep.missing, detail


def cluster_scan(quick: bool = False):
    rep = goldbach.scan(15, 10_000, ConstraintSpec("cluster", m=2, H=6))
    return not rep.missing, {"targets": rep.n_targets, "missing": len(rep.missing), "exceptions": rep.missing}


def singular_twin(quick: bool = False):
    L = arith.LinearFormSystem(((1, 0), (1, 2)))
    cut = 10 ** 6 if quick else 10 ** 7
    s = arith.singular_series(L, cut)
    s2 = arith.singular_series(L, 2 * cut)
    honest = abs(s2.value - s.value) < s.tail_bound
    return abs(s.value - TWIN_ORACLE) <= 1e-4 and honest, {
        "value": s.value, "tail_bound": s.tail_bound, "doubling_shift": abs(s2.value - s.value)}


def ramanujan_bound(quick: bool = False):
    q_max = 200 if quick else 500
    worst = 0.0
    violations = 0
    for poly in arith.NAMED_POLYS.values():
        for q in range(1, q_max + 1):
            sums, rho = arith.ramanujan_mod_sums(q, poly)
            a = np.flatnonzero(np.gcd(np.arange(q), q) == 1)
            mags = np.abs(sums[a])
            excess = mags - rho
            violations += int(np.count_nonzero(excess > 1e-9 * q))
            worst = max(worst, float(excess.max()))
    return violations == 0, {"q_max": q_max, "violations": violations, "max_excess": worst}


def _triple_loop_counts(N_max: int, spec: ConstraintSpec) -> np.ndarray:
    ps = [p for p in range(2, N_max + 1) if satisfies(p, spec)]
    out = np.zeros(N_max + 1, dtype=np.int64)
    for a in ps:
        for b in ps:
            if a + b > N_max:
                break
            for c in ps:
                if a + b + c > N_max:
                    break
                out[a + b + c] += 1
    return out


def oracle_equivalences(quick: bool = False, seed: int = 11):
    rng = np.random.default_rng(seed)
    detail = {}
    N_max = 200 if quick else 500
    counts_ok = all(np.array_equal(goldbach.representation_count(N_max, s), _triple_loop_counts(N_max, s))
                    for s in (UNRESTRICTED, ConstraintSpec("chen"), ConstraintSpec("cluster", 2, 6)))
    detail["counts_exact"] = counts_ok
    rel = 0.0
    for _ in range(10 if quick else 40):
        x = int(rng.integers(1, 10_001))
        al = float(rng.random())
        Q = int(rng.integers(1, 30))
        c = int(rng.integers(0, Q))
        for fast, slow in ((expsums.ap_expsum, expsums.ap_expsum_naive),
                           (expsums.prime_ap_expsum, expsums.prime_ap_expsum_naive)):
            A, B = fast(x, al, Q, c), slow(x, al, Q, c)
            rel = max(rel, abs(A - B) / max(1.0, abs(B)))
    for _ in range(3 if quick else 8):
        al = float(rng.random())
        M = int(rng.integers(1, 200))
        x = int(rng.integers(M, 10_001))
        A = expsums.tau_min_sum(al, M, x, 2).lhs
        B = expsums.tau_min_sum_naive(al, M, x, 2)
        rel = max(rel, abs(A - B) / max(1.0, abs(B)))
    for _ in range(1 if quick else 3):
        x = int(rng.integers(500, 2001))
        M = int(rng.integers(1, 6))
        al = float(rng.random())
        A = expsums.type_one_lhs(x, 2, M, al)
        B = expsums.type_one_lhs_naive(x, 2, M, al)
        rel = max(rel, abs(A - B) / max(1.0, abs(B)))
    detail["expsum_max_rel_error"] = rel
    rt = 0.0
    for N in (17, 256, 1000, 4096):
        f = cyclic.CyclicFunction(N, rng.random(N))
        back = cyclic.idft(cyclic.dft(f), real=True)
        rt = max(rt, float(np.max(np.abs(back.values - f.values))))
    detail["dft_roundtrip"] = rt
    return counts_ok and rel <= 1e-7 and rt <= 1e-10, detail


def fourier_norm_probe(quick: bool = False):
    exps = range(10, 14 if quick else 17)
    vals = []
    for e in exps:
        f = cyclic.wtricked_prime_function(2 ** e, 30, 1, (0.0, 1.0))
        vals.append(cyclic.lp_fourier_norm(f, 2.5))
    ok = all(math.isfinite(v) and v > 0 for v in vals)
    return ok, {"norms": vals, "max_over_min": max(vals) / min(vals),
                "within_3": max(vals) / min(vals) <= 3}


CRITERIA = [
    (1, "chen_constant_positive", chen_positivity),
    (2, "linear_sieve_base_ranges", sieve_base_ranges),
    (3, "bohr_cutoff_bounds", bohr_cutoff_bounds),
    (4, "selberg_vaaler_grid", majorant_grid),
    (5, "transference_property_suite", transference_suite),
    (6, "goldbach_chen_scan", chen_scan),
    (7, "goldbach_cluster_scan", cluster_scan),
    (8, "singular_series_twin", singular_twin),
    (9, "ramanujan_sum_bound", ramanujan_bound),
    (10, "oracle_equivalences", oracle_equivalences),
    (11, "fourier_norm_probe", fourier_norm_probe),
]


def run_criterion(number: int, quick: bool = False) -> CriterionResult:
    num, name, fn = CRITERIA[number - 1]
    return _timed(num, name, fn, quick)


def run_all(quick: bool = False, only=None):
    for num, name, fn in CRITERIA:
        if only and num not in only:
            continue
        yield _timed(num, name, fn, quick)
