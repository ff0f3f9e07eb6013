import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from primedelta import sieves
from primedelta.errors import DomainError, SizingError

from oracles import d, is_prime, mu, von_mangoldt


def test_first_divisor_counts(backend):
    seg = sieves.sieve_segment(1, 13)
    assert seg.d_values.tolist() == [1, 2, 2, 3, 2, 4, 2, 4, 3, 4, 2, 6]


def test_smallest_prime(backend):
    seg = sieves.sieve_segment(2, 3)
    assert seg.mu(2) == -1
    assert seg.von_mangoldt(2) == math.log(2)
    assert bool(seg.is_prime[0])


def test_large_prime_window(backend):
    seg = sieves.sieve_segment(999983, 999984)
    assert bool(seg.is_prime[0]) and seg.d(999983) == 2


@pytest.mark.parametrize("lo,hi,expected", [(1, 11, [2, 3, 5, 7]), (90, 100, [97]), (14, 16, [])])
def test_primes_in_examples(backend, lo, hi, expected):
    assert sieves.primes_in(lo, hi).tolist() == expected


def test_prime_count_to_million(backend):
    assert sieves.primes_in(1, 10**6 + 1).size == 78498


def test_all_small_n_match_trial_division(backend):
    seg = sieves.sieve_segment(1, 10**4 + 1)
    for n in range(1, 10**4 + 1):
        i = n - 1
        assert seg.d_values[i] == d(n)
        assert seg.mu_values[i] == mu(n)
        assert seg.von_mangoldt(n) == von_mangoldt(n)
        assert bool(seg.is_prime[i]) == is_prime(n)


def test_random_large_n_match_trial_division(backend):
    rng = np.random.default_rng(7)
    for n in rng.integers(1, 10**9, size=1000):
        n = int(n)
        seg = sieves.sieve_segment(n, n + 1)
        assert (seg.d(n), seg.mu(n), bool(seg.is_prime[0])) == (d(n), mu(n), is_prime(n))
        assert seg.von_mangoldt(n) == von_mangoldt(n)


@given(st.integers(1, 10**9), st.integers(1, 3000), st.integers(1, 3000))
def test_split_windows_concatenate(lo, a, b):
    whole = sieves.sieve_segment(lo, lo + a + b)
    left = sieves.sieve_segment(lo, lo + a)
    right = sieves.sieve_segment(lo + a, lo + a + b)
    for name in ("d_values", "mu_values", "lambda_base", "lambda_exp", "is_prime"):
        joined = np.concatenate([getattr(left, name), getattr(right, name)])
        assert np.array_equal(getattr(whole, name), joined)


@given(st.integers(1, 10**12), st.integers(1, 500))
def test_segment_invariants(lo, width):
    seg = sieves.sieve_segment(lo, lo + width)
    assert len(seg.d_values) == len(seg.mu_values) == len(seg.is_prime) == width
    assert np.all(seg.d_values >= 1)
    assert np.array_equal(seg.d_values == 2, seg.is_prime)
    prime_power = seg.lambda_base > 0
    n = np.arange(lo, lo + width)
    assert np.all(n[prime_power] == seg.lambda_base[prime_power] ** seg.lambda_exp[prime_power].astype(np.int64))


def test_backends_agree_on_a_high_window():
    from primedelta import _backend

    lo = 10**12 - 5000
    _backend.set_backend("numpy")
    try:
        a = sieves.sieve_segment(lo, lo + 20000)
    finally:
        _backend.set_backend("numba" if _backend.HAVE_NUMBA else "numpy")
    b = sieves.sieve_segment(lo, lo + 20000)
    for name in ("d_values", "mu_values", "lambda_base", "lambda_exp", "is_prime"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


def test_segments_are_read_only():
    seg = sieves.sieve_segment(1, 100)
    with pytest.raises(ValueError):
        seg.d_values[0] = 5


def test_window_errors():
    with pytest.raises(DomainError):
        sieves.sieve_segment(0, 10)
    with pytest.raises(SizingError):
        sieves.sieve_segment(1, 2 + (1 << 20))


def test_threads_do_not_change_primes():
    a = sieves.primes_in(10**6, 3 * 10**6, threads=1)
    b = sieves.primes_in(10**6, 3 * 10**6, threads=4)
    assert np.array_equal(a, b)
