import math

import pytest
from hypothesis import given, strategies as st

from primedelta import identities
from primedelta.errors import PreconditionError

from oracles import von_mangoldt


@pytest.mark.parametrize("n,k,z,expected", [(8, 1, 8, math.log(2)), (1, 2, 5, 0.0), (12, 3, 3, 0.0)])
def test_examples(n, k, z, expected):
    assert identities.heath_brown_rhs(n, k, z) == pytest.approx(expected, abs=1e-14)


def test_small_naive_enumeration_agrees():
    for n in range(1, 200):
        assert identities.heath_brown_rhs(n, 3, 5) == pytest.approx(identities.heath_brown_rhs_naive(n, 3, 5), abs=1e-12)


def test_range_refusal():
    with pytest.raises(PreconditionError):
        identities.heath_brown_rhs(100, 2, 5)
    with pytest.raises(PreconditionError):
        identities.verify_heath_brown(10**5, 3, 30)


@pytest.mark.parametrize("n_max,k,z,tol", [(10**5, 3, 37, 1e-8), (1000, 2, 23, 1e-10), (2, 1, 1, 1e-15)])
def test_verify_examples(backend, n_max, k, z, tol):
    assert identities.verify_heath_brown(n_max, k, z) < tol


@given(st.integers(1, 5000), st.integers(1, 3), st.floats(0.0, 10.0))
def test_z_independence(n, k, extra):
    z0 = identities.minimal_admissible_z(n, k)
    a = identities.heath_brown_rhs(n, k, z0)
    b = identities.heath_brown_rhs(n, k, z0 + extra)
    assert a == pytest.approx(b, abs=1e-10)
    assert a == pytest.approx(von_mangoldt(n), abs=1e-10)


def test_minimal_z_is_admissible_and_tight():
    for n_max in (10, 1000, 50_000, 10**5):
        for k in (1, 2, 3):
            z = identities.minimal_admissible_z(n_max, k)
            assert n_max <= 2 * z**k
            below = math.nextafter(z, 0)
            assert n_max > 2 * below**k


def test_table_and_pointwise_paths_agree():
    z = identities.minimal_admissible_z(3000, 2)
    table = identities.heath_brown_table(3000, 2, z)
    for n in range(1, 3001, 13):
        assert table[n] == pytest.approx(identities.heath_brown_rhs(n, 2, z), abs=1e-11)
