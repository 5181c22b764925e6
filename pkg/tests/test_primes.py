import numpy as np
import pytest
from hypothesis import given, strategies as st

from almosttwin.primes import (ConstraintSpec, constrained_primes, factorize, is_P2, omega_table,
                               satisfies, sieve_range, small_primes, witness)


def trial_prime(n):
    return n >= 2 and all(n % d for d in range(2, int(n ** 0.5) + 1))


def test_small_range_matches_trial_division():
    assert sieve_range(1, 30).primes().tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert sieve_range(2, 3).primes().tolist() == [2]


def test_prime_count_to_a_million():
    assert sieve_range(1, 10 ** 6).primes().size == 78498


@given(st.integers(0, 200_000), st.integers(1, 3000))
def test_segment_agrees_with_monolithic(lo, width):
    whole = sieve_range(1, lo + width + 1).primes()
    part = sieve_range(lo, lo + width).primes()
    assert part.tolist() == whole[(whole >= lo) & (whole < lo + width)].tolist()


def test_factorize_examples():
    assert factorize(12) == [2, 2, 3]
    assert factorize(7) == [7]
    assert factorize(9409) == [97, 97]
    with pytest.raises(ValueError):
        factorize(1)


@given(st.integers(2, 10 ** 9))
def test_factorize_product(n):
    fs = factorize(n)
    assert int(np.prod(fs, dtype=object)) == n
    assert all(trial_prime(p) for p in set(fs) if p < 10 ** 5)


def test_is_P2_examples():
    assert is_P2(15, 3)
    assert is_P2(7, 2)
    assert not is_P2(105, 2)
    assert not is_P2(15, 5)


def test_omega_table_against_factorize():
    om, spf = omega_table(2, 3000)
    for m in range(2, 3000):
        fs = factorize(m)
        assert om[m - 2] == len(fs) and spf[m - 2] == min(fs)


def test_chen_small_set():
    # brute force: every prime below 30 has p + 2 with at most two prime factors
    t = sieve_range(1, 40)
    got = constrained_primes(t, ConstraintSpec("chen"), hi=30).tolist()
    brute = [p for p in range(2, 30) if trial_prime(p) and len(factorize(p + 2)) <= 2]
    assert got == brute == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_cluster_small_set():
    t = sieve_range(1, 50)
    got = constrained_primes(t, ConstraintSpec("cluster", m=2, H=6), lo=5, hi=30).tolist()
    assert got == [5, 7, 11, 13, 17, 19, 23, 29]


def test_cluster_m1_is_all_primes():
    t = sieve_range(1, 1100)
    spec = ConstraintSpec("cluster", m=1, H=3)
    assert constrained_primes(t, spec, lo=10, hi=1000).tolist() == t.primes(10, 1000).tolist()


def test_cluster_H2_is_lower_twins():
    t = sieve_range(1, 10 ** 5 + 10)
    ps = t.primes(1, 10 ** 5)
    twins = ps[np.isin(ps + 2, t.primes())]
    got = constrained_primes(t, ConstraintSpec("cluster", m=2, H=2), hi=10 ** 5)
    # [2, 4] holds 2 and 3, so 2 qualifies without being a lower twin
    assert got.tolist() == [2] + twins.tolist()


@pytest.mark.parametrize("rough", [2, 3, 7])
def test_chen_outputs_recheck(rough):
    spec = ConstraintSpec("chen", rough=rough)
    t = sieve_range(1, 10 ** 5 + 10)
    for p in constrained_primes(t, spec, hi=10 ** 5).tolist():
        fs = factorize(p + 2)
        assert len(fs) <= 2 and min(fs) >= rough


def test_short_table_is_rejected():
    t = sieve_range(1, 31)
    with pytest.raises(ValueError):
        constrained_primes(t, ConstraintSpec("chen"), hi=30)


def test_witness_and_satisfies():
    spec = ConstraintSpec("chen")
    assert witness(7, spec) == [3, 3]
    assert satisfies(7, spec) and not satisfies(8, spec)
    assert small_primes(10).tolist() == [2, 3, 5, 7]
