import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from almosttwin.trigpoly import (DegenerateRegime, TrigPoly, bohr_cutoff, bohr_distances, bohr_members,
                                 dirichlet_approx, fejer, fejer_closed, fejer_exact, nominal_degree,
                                 sawtooth, selberg_coefficient_bound, selberg_majorant, selberg_on_grid,
                                 spectrum_factorize, torus_dist, vaaler, vaaler_coefficients,
                                 vaaler_from_definition)

GRID = np.linspace(-0.5, 0.5, 10_001)


def test_fejer_values():
    assert fejer(7)(0.0).real == pytest.approx(7)
    assert abs(fejer(2)(0.5)) < 1e-14
    assert fejer_exact(3)[1] == Fraction(2, 3)
    assert np.min(fejer(9)(np.linspace(0, 1, 1000)).real) >= -1e-12


@given(st.integers(1, 40))
def test_fejer_matches_closed_form(K):
    x = np.linspace(0.001, 0.999, 257)
    assert np.allclose(fejer(K)(x).real, fejer_closed(K, x), atol=1e-10)


def test_vaaler_closed_coefficients_match_definition():
    for D in (1, 2, 5, 13):
        a = vaaler(D).coeffs
        b = vaaler_from_definition(D).coeffs
        assert np.max(np.abs(a - b)) < 1e-13


@pytest.mark.parametrize("D", [1, 3, 8, 30])
def test_vaaler_odd_and_close_to_sawtooth(D):
    V = vaaler(D)
    assert abs(V(0.0)) < 1e-14
    assert np.allclose(V(GRID), -V(-GRID), atol=1e-13)
    err = np.abs(V(GRID).real - sawtooth(GRID))
    bound = fejer(D + 1)(GRID).real / (2 * D + 2)
    assert np.all(err <= bound + 1e-12)
    assert vaaler_coefficients(D).shape == (D,)


def test_vaaler_pointwise_example():
    x = 0.3
    assert abs(vaaler(8)(x).real - sawtooth(x)) <= fejer(9)(x).real / 18


@pytest.mark.parametrize("D,eta", [(1, 0.5), (5, 0.25), (20, 0.1), (64, 0.02)])
def test_selberg_majorizes_interval(D, eta):
    S = selberg_majorant(D, eta)
    x = np.linspace(-0.5, 0.5, 100_001)
    ind = (torus_dist(x) <= eta).astype(float)
    assert np.min(S(x).real - ind) >= -1e-9
    assert S(0.0).real >= 1
    assert S.degree <= D + 1
    ks = np.arange(-S.bound, S.bound + 1)
    assert np.all(np.abs(S.coeffs) <= selberg_coefficient_bound(D, eta, ks) + 1e-12)


def test_selberg_grid_matches_poly():
    D, eta, N = 17, 0.13, 50
    S = selberg_majorant(D, eta)
    assert np.allclose(selberg_on_grid(D, eta, N), S(np.arange(N) / N).real, atol=1e-11)


def test_bad_eta_rejected():
    with pytest.raises(ValueError):
        selberg_majorant(3, 0.9)
    with pytest.raises(ValueError):
        bohr_cutoff(12, [1], 0.0)


def test_trigpoly_algebra():
    P = TrigPoly.from_dict({1: 1.0, -1: 1.0})
    x = np.array([0.1, 0.37])
    assert np.allclose((P * P)(x), P(x) ** 2)
    assert np.allclose((P + P)(x), 2 * P(x))
    assert np.allclose(P.shift(0.2)(x), P(x - 0.2))
    assert np.allclose(P.reflect()(x), P(-x))


def test_bohr_members_examples():
    assert bohr_members(12, [1], 1 / 6).tolist() == [0, 1, 2, 10, 11]
    assert bohr_members(9, [], 0.1).tolist() == list(range(9))


@given(st.integers(5, 400), st.lists(st.integers(0, 400), min_size=1, max_size=3), st.floats(0.01, 0.5))
def test_bohr_size_lower_bound(N, Om, eta):
    B = bohr_members(N, Om, eta)
    assert B.size >= (eta / 2) ** len(set(o % N for o in Om)) * N - 1e-9


def test_cutoff_small_example():
    chi = bohr_cutoff(12, [1], 1 / 6)
    assert chi.D == chi.D_nominal == 24 ** 2
    assert np.all(chi.values[bohr_members(12, [1], 1 / 6)] >= 1)
    zero = bohr_cutoff(10, [0], 0.2)
    assert np.allclose(zero.values, zero.values[0]) and zero.values[0] >= 1


def test_cutoff_bounds_and_expansion():
    chi = bohr_cutoff(101, [1, 3], 0.1, D=400)
    assert chi.l1_norm >= chi.l1_lower_bound == (0.1 / 2) ** 2
    assert chi.max_off_bohr() <= chi.off_bohr_bound
    assert np.max(np.abs(chi.spectrum() - chi.spectrum_by_product())) < 1e-8
    comb = chi.as_exponential_combination()
    n = np.arange(101)
    assert np.allclose(comb(n), chi.values, atol=1e-8)


def test_nominal_degree():
    assert nominal_degree(1 / 6, 1) == 576
    assert nominal_degree(0.01, 6) == 400 ** 12


def test_dirichlet_examples():
    assert dirichlet_approx(Fraction(1, 3), 10) == (1, 3, 0.0)
    assert dirichlet_approx(0.0, 5) == (0, 1, 0.0)
    a, q, beta = dirichlet_approx(math.pi % 1, 100)
    assert (a, q) == (1, 7)
    assert abs(beta) <= 1 / 700
    assert beta == pytest.approx(math.pi - 22 / 7, abs=1e-12)


@given(st.floats(0, 1, exclude_max=True), st.integers(1, 10 ** 6))
def test_dirichlet_property(alpha, qmax):
    a, q, beta = dirichlet_approx(alpha, qmax)
    assert 1 <= q <= qmax and math.gcd(a, q) == 1
    assert abs(beta) <= 1 / (q * qmax) * (1 + 1e-9)
    assert torus_dist(alpha - a / q - beta) < 1e-9


def test_spectrum_factorize_examples():
    N = 10 ** 4000
    f = spectrum_factorize([Fraction(1, 3)], 1, N, 1.0)
    assert f.q == (3,) and f.Q == 3 and f.dichotomy_holds()
    z = spectrum_factorize([0, 0], 1, 10 ** 20000, 1.0)
    assert z.q == (1, 1) and z.Q == 1
    with pytest.raises(DegenerateRegime):
        spectrum_factorize([0.1], 1, 10 ** 6, 1.0)


@given(st.lists(st.fractions(0, 1, max_denominator=500), min_size=1, max_size=2), st.integers(1, 6))
def test_spectrum_factorize_fixed_point(phases, W):
    f = spectrum_factorize(phases, W, 10 ** 20000, 1.0)
    assert f.iterations <= len(phases) + 1
    assert f.dichotomy_holds() and f.Q_within_bound()


def test_bohr_distances_shape():
    d = bohr_distances(10, [1, 2])
    assert d.shape == (10,) and d[0] == 0
