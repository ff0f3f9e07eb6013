import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from primedelta import spacing
from primedelta.errors import BudgetExceeded, DomainError

alphas = st.sampled_from([0.25, 0.5, 0.75, 1.0])
tols = st.floats(1e-4, 1.0)


def test_t_value_examples():
    assert spacing.t_value(2, 3, 2, 0.5, 0.5) == pytest.approx((math.sqrt(3) - math.sqrt(2)) * math.sqrt(2), abs=1e-15)
    assert spacing.t_value(5, 7, 7, 0.3, 0.9) == 0.0
    assert spacing.t_value(1, 4, 1, 0.5, 0.5) == 1.0


@given(st.integers(1, 10**6), st.integers(1, 10**6), alphas)
def test_power_diff_antisymmetric(a, b, alpha):
    assert spacing.power_diff(a, b, alpha) == -spacing.power_diff(b, a, alpha)
    assert spacing.power_diff(a, b, alpha) == pytest.approx(a**alpha - b**alpha, abs=1e-9 * max(a, b) ** alpha)


def test_count_B_examples(backend):
    assert spacing.count_spacing_B(spacing.SpacingInstance(2, 1, 1, 0.5, 0.5, 0.1)) == 2
    inst = spacing.SpacingInstance(3, 2, 2, 0.5, 0.5, 1e9)
    k = spacing.spacing_values(inst).size
    assert spacing.count_spacing_B(inst) == k * k
    assert spacing.count_spacing_B(spacing.SpacingInstance(1, 1, 1, 0.5, 0.5, 0.1)) == 0


@given(st.integers(1, 12), st.integers(1, 12), st.integers(1, 6), alphas, alphas, tols)
def test_count_B_symmetric_and_diagonal(M1, M2, H, a, b, tol):
    inst = spacing.SpacingInstance(M1, M2, H, a, b, tol)
    swapped = spacing.SpacingInstance(M2, M1, H, a, b, tol)
    count = spacing.count_spacing_B(inst)
    assert count == spacing.count_spacing_B(swapped)
    assert count >= spacing.spacing_values(inst).size


@given(st.integers(1, 10), st.integers(1, 10), st.integers(1, 5), tols, tols)
def test_counters_monotone_in_tolerance(M1, M2, H, t1, t2):
    lo, hi = sorted((t1, t2))
    a = spacing.count_spacing_B(spacing.SpacingInstance(M1, M2, H, 0.5, 0.5, lo))
    b = spacing.count_spacing_B(spacing.SpacingInstance(M1, M2, H, 0.5, 0.5, hi))
    assert a <= b
    assert spacing.count_quadruplets_N(M1 + 2, lo, 0.5) <= spacing.count_quadruplets_N(M1 + 2, hi, 0.5)
    # the window is 1/(2X): a larger X is a smaller tolerance
    assert spacing.count_close_pairs(M1 * 20, 1 / lo) <= spacing.count_close_pairs(M1 * 20, 1 / hi)


def test_proposition_bound_properties():
    inst = spacing.SpacingInstance(8, 8, 8, 0.5, 0.5, 0.01)
    first = (64.0) ** 1.5 * 8**1.5
    assert spacing.proposition_bound(inst) > first
    assert spacing.proposition_bound(spacing.SpacingInstance(8, 8, 8, 0.5, 0.5, 0.0)) == first
    values = [spacing.proposition_bound(spacing.SpacingInstance(8, 8, 8, 0.5, 0.5, t)) for t in (1e-4, 1e-3, 1e-2, 1e-1)]
    assert values == sorted(values)


def test_budget_refusal():
    with pytest.raises(BudgetExceeded):
        spacing.count_spacing_B(spacing.SpacingInstance(300, 300, 300, 0.5, 0.5, 0.1))
    with pytest.raises(BudgetExceeded):
        spacing.count_quadruplets_N(3001, 0.1, 0.5)


def test_quadruplet_examples(backend):
    assert spacing.count_quadruplets_N(10, 1e-12, 0.5) == 190
    assert spacing.count_quadruplets_N(2, 1e-12, 0.5) == 6
    assert spacing.count_quadruplets_N(7, 2.0, 0.5) == 7**4


@given(st.integers(1, 40), st.floats(1e-9, 1.0))
def test_quadruplet_diagonal_bound(M, delta):
    assert spacing.count_quadruplets_N(M, delta, 0.5) >= 2 * M * M - M


def test_close_pair_examples(backend):
    assert spacing.count_close_pairs(100, 1e6) == 100
    v = spacing.count_close_pairs(100, 1)
    assert v == spacing.count_close_pairs_naive(100, 1)
    assert v <= (1 + 2 * math.sqrt(200)) * 100
    assert spacing.count_close_pairs(1, 0.5) == 1


def test_proximity_examples():
    r = spacing.pair_proximity_check([0.0], [0.0], 1.0)
    assert (r.lhs, r.rhs) == (1, 3.0)
    k = 17
    r = spacing.pair_proximity_check([0.0] * k, [0.0] * k, 0.0)
    assert (r.lhs, r.rhs) == (k * k, 3.0 * k * k)
    with pytest.raises(DomainError):
        spacing.pair_proximity_check([], [1.0], 0.1)


def test_proximity_random_lists():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        a = rng.uniform(0, 100, 1000)
        b = rng.uniform(0, 100, 1000)
        assert spacing.pair_proximity_check(a, b, 0.05).holds


def test_t_sum_examples(backend):
    assert spacing.T_sum(1, 1, 0.5, 0.5).value == 0.0
    hand = 2 / math.sqrt(2 - math.sqrt(3))
    assert spacing.T_sum(2, 2, 0.5, 0.5).value == pytest.approx(hand, rel=1e-14)


def test_t_sum_ratio_stable():
    ratios = [spacing.T_sum(n, n, 0.5, 0.5).bound_ratio for n in (32, 128, 512)]
    assert max(ratios) / min(ratios) <= 3


@given(st.integers(1, 60), st.integers(1, 60), alphas, alphas)
def test_t_sum_against_direct_loop(N1, N2, a, b):
    direct = math.fsum(
        abs(n1**a - n2**a) ** -b for n1 in range(N1 + 1, 2 * N1 + 1) for n2 in range(N2 + 1, 2 * N2 + 1) if n1 != n2
    )
    assert spacing.T_sum(N1, N2, a, b).value == pytest.approx(direct, rel=1e-12)


def test_window_counts_against_naive(backend):
    rng = np.random.default_rng(5)
    for _ in range(50):
        v = np.round(rng.uniform(0, 10, rng.integers(1, 300)), int(rng.integers(0, 3)))
        tol = float(rng.choice([0.0, 0.01, 0.1, 1.0]))
        assert spacing.count_self_within(v, tol) == spacing.count_pairs_naive(v, tol)


def test_instance_validation():
    with pytest.raises(DomainError):
        spacing.SpacingInstance(0, 1, 1, 0.5, 0.5, 0.1)
    with pytest.raises(DomainError):
        spacing.SpacingInstance(1, 1, 1, 1.5, 0.5, 0.1)
