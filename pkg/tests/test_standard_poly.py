from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opfree.exceptions import DimensionError, SizeLimitError
from opfree.matrices import matrix_unit, random_complex, random_selfadjoint
from opfree.standard_poly import (
    find_nonvanishing_witness,
    permutation_sign,
    standard_polynomial,
    standard_polynomial_bruteforce,
    verify_al_vanishing,
)


def _sign_by_inversions(perm):
    inv = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
    return -1 if inv % 2 else 1


@pytest.mark.parametrize("d", range(1, 7))
def test_permutation_sign_matches_inversion_count(d):
    for perm in permutations(range(d)):
        assert permutation_sign(perm) == _sign_by_inversions(perm)


def test_degree_two_is_commutator():
    rng = np.random.default_rng(0)
    x, y = random_complex(rng, 3), random_complex(rng, 3)
    assert np.allclose(standard_polynomial([x, y]), x @ y - y @ x)


@pytest.mark.parametrize("d,k", [(1, 2), (3, 2), (4, 3), (5, 2), (6, 2)])
def test_subset_recursion_matches_bruteforce(d, k):
    rng = np.random.default_rng(d * 10 + k)
    args = [random_complex(rng, k) for _ in range(d)]
    assert np.allclose(standard_polynomial(args), standard_polynomial_bruteforce(args))


def test_amitsur_levitzki_on_selfadjoint_m2():
    rng = np.random.default_rng(1)
    for _ in range(10):
        args = [random_selfadjoint(rng, 2) for _ in range(4)]
        assert np.abs(standard_polynomial_bruteforce(args)).max() <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 3), st.integers(0, 3))
def test_alternating(seed, i, j):
    rng = np.random.default_rng(seed)
    args = [random_complex(rng, 2) for _ in range(4)]
    swapped = list(args)
    swapped[i], swapped[j] = swapped[j], swapped[i]
    sign = 1 if i == j else -1
    assert np.allclose(standard_polynomial(swapped), sign * standard_polynomial(args))
    if i != j:
        args[j] = args[i]
        assert np.allclose(standard_polynomial(args), 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(-3, 3), st.integers(0, 2))
def test_multilinear(seed, c, pos):
    rng = np.random.default_rng(seed)
    args = [random_complex(rng, 3) for _ in range(3)]
    y = random_complex(rng, 3)
    mixed = list(args)
    mixed[pos] = args[pos] + c * y
    other = list(args)
    other[pos] = y
    lhs = standard_polynomial(mixed)
    rhs = standard_polynomial(args) + c * standard_polynomial(other)
    assert np.allclose(lhs, rhs, atol=1e-10)


@pytest.mark.parametrize("n,trials", [(1, 20), (2, 100), (3, 20)])
def test_al_vanishing_reports(n, trials):
    rep = verify_al_vanishing(n, trials=trials)
    assert rep.passed and rep.checks[0].value <= 1e-10


def test_al_size_guard():
    with pytest.raises(SizeLimitError):
        verify_al_vanishing(4)
    with pytest.raises(SizeLimitError):
        standard_polynomial([np.eye(1)] * 9)
    with pytest.raises(DimensionError):
        standard_polynomial([np.eye(2), np.eye(3)])


def test_witnesses():
    w1 = find_nonvanishing_witness(1)
    assert w1.degree == 1 and np.allclose(w1.value(), 1)
    w2 = find_nonvanishing_witness(2)
    assert w2.labels == ("E11", "E12", "E21")
    assert np.abs(standard_polynomial_bruteforce(list(w2.arguments))).max() > 0.5
    w3 = find_nonvanishing_witness(3)
    assert w3.degree == 5
    assert np.abs(standard_polynomial_bruteforce(list(w3.arguments))).max() > 0.5


def test_explicit_m2_witness():
    args = [matrix_unit(2, 1, 1), matrix_unit(2, 1, 2), matrix_unit(2, 2, 1)]
    assert np.abs(standard_polynomial(args)).max() > 0


def test_no_witness_for_vanishing_degree():
    assert find_nonvanishing_witness(2, degree=4) is None
