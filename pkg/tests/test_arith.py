import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from almosttwin.arith import (LinearFormSystem, allowed_residues, is_admissible, local_root_count,
                              parse_poly, primorial, ramanujan_mod_sum, ramanujan_mod_sums,
                              root_count_mod, singular_series, w_trick)
from almosttwin.primes import factorize, small_primes

TWIN = LinearFormSystem.parse("1,0;1,2")


def test_admissibility():
    assert is_admissible(TWIN)
    assert not is_admissible(LinearFormSystem.parse("1,0;1,1"))
    assert is_admissible(LinearFormSystem.parse("1,0"))
    assert not is_admissible(LinearFormSystem.parse("1,0;1,2;1,4"))
    assert not is_admissible(LinearFormSystem.parse("7,14"))


def test_local_root_counts():
    assert local_root_count(TWIN, 2) == 1
    assert local_root_count(TWIN, 5) == 2
    single = LinearFormSystem.parse("1,0")
    assert all(local_root_count(single, p) == 1 for p in (2, 3, 11))
    with pytest.raises(ValueError):
        local_root_count(TWIN, 9)


forms = st.lists(st.tuples(st.integers(1, 12), st.integers(-30, 30)), min_size=1, max_size=4, unique=True)


@given(forms, st.sampled_from(small_primes(60).tolist()))
def test_root_count_range(fs, p):
    L = LinearFormSystem(tuple(fs))
    nu = local_root_count(L, p)
    if all(a % p for a, _ in fs):
        assert nu <= min(L.k, p)
    disc = L.discriminant()
    if disc != 0 and disc % p:
        assert nu == L.k


@given(forms)
def test_admissible_matches_full_scan(fs):
    L = LinearFormSystem(tuple(fs))
    bound = max(50, L.k + 1)
    brute = all(local_root_count(L, p) < p for p in small_primes(bound).tolist()
                if p <= L.k or any(math.gcd(a, b) % p == 0 for a, b in fs))
    assert is_admissible(L) == brute


def test_singular_series_examples():
    s = singular_series(LinearFormSystem.parse("1,0"), 1000)
    assert s.value == 1.0 and s.tail_bound == 0.0
    bad = singular_series(LinearFormSystem.parse("1,0;1,1"), 1000)
    assert bad.value == 0.0 and not bad.admissible
    prop = singular_series(LinearFormSystem.parse("1,0;2,0"), 1000)
    assert prop.value == 0.0 and not prop.admissible


def test_twin_singular_series():
    s = singular_series(TWIN, 10 ** 7)
    assert abs(s.value - 1.320324) <= 1e-4
    assert s.value == pytest.approx(1.3203236316, abs=1e-6)


@pytest.mark.parametrize("text,cutoff", [("1,0;1,2", 10 ** 4), ("1,0;1,2;1,6", 5000), ("2,1;3,5", 3000)])
def test_tail_bound_honest(text, cutoff):
    L = LinearFormSystem.parse(text)
    a = singular_series(L, cutoff)
    b = singular_series(L, 2 * cutoff)
    assert abs(a.value - b.value) <= a.tail_bound


def test_ramanujan_examples():
    s, rho = ramanujan_mod_sum(1, 3, parse_poly("n"))
    assert s == pytest.approx(-1) and rho == 1
    s, rho = ramanujan_mod_sum(1, 4, parse_poly("n"))
    assert abs(s) < 1e-12 and rho == 1
    s, rho = ramanujan_mod_sum(0, 1, parse_poly("n^2+1"))
    assert s == pytest.approx(1)
    with pytest.raises(ValueError):
        ramanujan_mod_sum(2, 4, (0, 1))


@given(st.integers(1, 600), st.lists(st.integers(-5, 5), min_size=1, max_size=4))
def test_ramanujan_bound(q, poly):
    sums, rho = ramanujan_mod_sums(q, poly)
    a = np.arange(q)
    coprime = np.gcd(a, q) == 1
    assert np.all(np.abs(sums[coprime]) <= rho + 1e-9 * q)
    assert rho == root_count_mod(poly, q)


def test_fft_sums_match_single():
    sums, _ = ramanujan_mod_sums(35, (1, 0, 1))
    for a in (1, 2, 4, 34):
        assert sums[a] == pytest.approx(ramanujan_mod_sum(a, 35, (1, 0, 1))[0], abs=1e-9)


def test_w_trick():
    assert primorial(5) == 30
    assert w_trick(3, 33, twin_coprime=True) == (6, (5, 5, 5))
    with pytest.raises(ValueError):
        w_trick(3, 31, twin_coprime=True)
    assert w_trick(5, 37, count=1) == (30, (7,))


@given(st.integers(2, 13), st.integers(3, 10 ** 6))
def test_w_trick_residues(w, n):
    W = primorial(w)
    n = n | 1
    W, bs = w_trick(w, n)
    assert all(math.gcd(b, W) == 1 and 1 <= b <= W for b in bs)
    assert (sum(bs) - n) % W == 0
    assert allowed_residues(W).size == math.prod(p - 1 for p in factorize(W))
