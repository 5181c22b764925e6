import math

import numpy as np
import pytest

from almosttwin.sievefn import (E_GAMMA, build_sieve_table, chen_constant, density_B,
                                density_B_inner_closed)


@pytest.fixture(scope="module")
def table():
    return build_sieve_table(5.0, 1e-4)


def test_base_values(table):
    assert abs(float(table.F(2.0)) - E_GAMMA) <= 1e-8
    assert float(table.f(1.5)) == 0.0
    assert abs(float(table.f(3.0)) - 2 * E_GAMMA * math.log(2) / 3) <= 1e-6


def test_closed_forms_on_base_ranges(table):
    s = np.linspace(1, 3, 2001)
    assert np.max(np.abs(table.F(s) - 2 * E_GAMMA / s)) <= 1e-10
    s = np.linspace(2, 4, 2001)
    assert np.max(np.abs(table.f(s) - 2 * E_GAMMA * np.log(s - 1) / s)) <= 1e-8


def test_continuity_at_joints(table):
    for k in (2, 3, 4):
        for fn in (table.F, table.f):
            assert abs(float(fn(k - 1e-9)) - float(fn(k + 1e-9))) <= 1e-8


def test_functions_are_monotone_and_bounded(table):
    s = np.linspace(1, 5, 4001)
    F, f = table.F(s), table.f(s)
    assert np.all(np.diff(F) <= 1e-12) and np.all(np.diff(f) >= -1e-12)
    assert np.all(f <= F)


def test_chen_constant_positive_and_stable(table):
    c = chen_constant(0.0, table=table)
    assert c.value > 0
    assert abs(c.fine - c.coarse) <= 1e-6
    assert abs(c.extrapolated - c.value) <= 1e-6
    # frozen from the two-resolution run
    assert c.value == pytest.approx(0.0614039984, abs=1e-8)
    assert c.delta_B1 == pytest.approx(0.4909952010, abs=1e-8)


def test_chen_constant_continuous_in_eps(table):
    a = chen_constant(0.0, table=table).value
    b = chen_constant(1e-3, table=table).value
    assert abs(a - b) <= 0.05


def test_chen_constant_step_halving(table):
    c = chen_constant(0.0, table=table)
    half = chen_constant(0.0, table=build_sieve_table(5.0, 5e-5))
    assert abs(c.value - half.value) <= max(4 * c.error_estimate, 1e-12)


def test_chen_constant_rejects_short_table():
    with pytest.raises(ValueError):
        chen_constant(0.0, table=build_sieve_table(4.0, 1e-3))
    with pytest.raises(ValueError):
        chen_constant(0.2)


def test_density_B():
    assert density_B(2, 1e-4) <= 1e-2
    assert density_B(2, 0.0) == 0.0
    v, err = density_B(1, 0.0, with_error=True)
    assert err <= 1e-8
    assert v == pytest.approx(density_B_inner_closed(1, 0.0), abs=1e-8)


def test_density_B1_monte_carlo():
    rng = np.random.default_rng(2024)
    n = 2_000_000
    # sample the bounding box of the domain
    a1 = rng.uniform(0.1, 1 / 3, n)
    a2 = rng.uniform(1 / 3, 0.45, n)
    inside = a2 <= (1 - a1) / 2
    g = np.where(inside, 1 / (a1 * a2 * (1 - a1 - a2)), 0.0)
    area = (1 / 3 - 0.1) * (0.45 - 1 / 3)
    est, se = g.mean() * area, g.std() * area / math.sqrt(n)
    assert abs(est - density_B(1, 0.0)) <= 3 * se
