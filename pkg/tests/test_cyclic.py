import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from almosttwin.cyclic import (CyclicFunction, convolve, dft, dft_direct, idft, large_spectrum,
                               lp_fourier_norm, transference_check, transference_decompose,
                               transference_parameters, triple_at, wtricked_prime_function)
from almosttwin.trigpoly import bohr_cutoff

values = arrays(np.float64, st.integers(1, 64), elements=st.floats(-10, 10))


def test_dft_constants_and_delta():
    F = dft(CyclicFunction.constant(16, 2.5)).values
    assert F[0] == pytest.approx(2.5) and np.allclose(F[1:], 0)
    delta = np.zeros(16)
    delta[0] = 16
    assert np.allclose(dft(CyclicFunction(16, delta)).values, 1)


@given(values)
def test_dft_matches_direct_and_parseval(v):
    f = CyclicFunction.from_values(v)
    F = dft(f).values
    assert np.allclose(F, dft_direct(f), atol=1e-10)
    assert np.sum(np.abs(F) ** 2) == pytest.approx(np.mean(v ** 2), rel=1e-10, abs=1e-10)
    assert np.allclose(idft(dft(f), real=True).values, v, atol=1e-10)


@given(values, st.integers(0, 10 ** 6))
def test_convolution_paths_agree(v, seed):
    g = np.random.default_rng(seed).normal(size=v.size)
    f, g = CyclicFunction.from_values(v), CyclicFunction.from_values(g)
    a = convolve(f, g, method="direct").values
    b = convolve(f, g, method="fft").values
    assert np.allclose(a, b, atol=1e-9)


def test_convolution_identities():
    f = CyclicFunction.from_values(np.arange(10.0))
    delta = np.zeros(10)
    delta[0] = 10
    assert np.allclose(convolve(f, CyclicFunction(10, delta)).values, f.values)
    one = CyclicFunction.constant(10)
    assert np.allclose(convolve(one, one).values, 1)
    with pytest.raises(ValueError):
        convolve(f, CyclicFunction.constant(11))


def test_window_triple_count():
    N = 1000
    f = CyclicFunction.indicator(N, 250, 500)
    brute = sum(1 for a in range(250, 500) for b in range(250, 500) if 250 <= N - a - b < 500)
    assert brute == 31623
    assert triple_at(f, f, f, 0) == pytest.approx(brute / N ** 2, rel=1e-12)


def test_fourier_norms():
    one = CyclicFunction.constant(50)
    assert lp_fourier_norm(one, 2.5) == pytest.approx(1)
    rng = np.random.default_rng(3)
    f = CyclicFunction.from_values(rng.random(77))
    assert lp_fourier_norm(f, 2) == pytest.approx(np.mean(f.values ** 2))


def test_large_spectrum():
    one = CyclicFunction.constant(20)
    assert large_spectrum(one, 0.5) == [0, 1]
    assert large_spectrum(one, 2.0) == [1]


@given(arrays(np.float64, st.integers(8, 200), elements=st.floats(0, 1)), st.floats(0.01, 1))
def test_large_spectrum_size(v, eps):
    f = CyclicFunction.from_values(v)
    assert len(large_spectrum(f, eps)) <= eps ** -2.5 * lp_fourier_norm(f, 2.5) + 1 + 1e-9


def test_decompose_identities():
    rng = np.random.default_rng(5)
    N = 97
    f = CyclicFunction.from_values(rng.random(N))
    chi = bohr_cutoff(N, [1, 4], 0.05, D=300)
    g, h = transference_decompose(f, chi)
    assert np.array_equal((g + h).values, f.values) or np.allclose((g + h).values, f.values, atol=1e-15)
    ratio = chi.spectrum() / chi.l1_norm
    F = dft(f).values
    assert np.allclose(dft(g).values, F * ratio, atol=1e-8)
    assert np.allclose(dft(h).values, F * (1 - ratio), atol=1e-8)
    assert lp_fourier_norm(g, 2.5) <= lp_fourier_norm(f, 2.5) + 1e-12
    assert lp_fourier_norm(h, 2.5) <= 2 ** 2.5 * lp_fourier_norm(f, 2.5)
    g1, h1 = transference_decompose(CyclicFunction.constant(N), chi)
    assert np.allclose(g1.values, 1) and np.allclose(h1.values, 0, atol=1e-12)


def test_omega_defect_small():
    N = 503
    eta = 0.02
    chi = bohr_cutoff(N, [1, 7], eta, D=2000)
    spec = chi.spectrum()
    for xi in (1, 7):
        assert abs(1 - spec[xi] / chi.l1_norm) <= 30 * eta


def test_parameters():
    eta, eps = transference_parameters(0.3, 1.0)
    assert eta == pytest.approx(0.3 / 1200)
    assert eps == pytest.approx((0.027 / 32000) ** 2)


def test_constants_saturate():
    # N = 100 puts 31 points in [0.1N, 0.4N], enough for an average of 0.3
    one = CyclicFunction.constant(100)
    r = transference_check(one, one, one, delta=0.3, K=1.0)
    assert r.hypotheses_hold and r.lhs == pytest.approx(1)
    assert r.conclusion_holds and not r.violation


def test_window_measured_delta():
    f = CyclicFunction.indicator(1000, 250, 500)
    r = transference_check(f, f, f)
    assert r.lhs == pytest.approx(31623 / 10 ** 6)
    assert r.hypotheses_hold and r.conclusion_holds


def test_support_obstruction_withholds_guarantee():
    N = 400
    one = CyclicFunction.constant(N)
    low = CyclicFunction.indicator(N, 1, N // 4)
    r = transference_check(one, low, one, delta=0.5, K=1.0)
    assert not r.rich_bohr and not r.hypotheses_hold and not r.violation


def test_wtricked_prime_function_support():
    f = wtricked_prime_function(600, W=6, b=5)
    nz = np.flatnonzero(f.values)
    assert nz.min() >= 150 and nz.max() < 300
    assert np.all(f.values >= 0)
    with pytest.raises(ValueError):
        wtricked_prime_function(600, W=6, b=3)
