import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import (
    moments_from_cumulants,
    product_form_functional,
    random_word,
    scalar_cumulants_oracle,
    semicircle_moment,
)
from opfree.exceptions import CrossingPartitionError, DimensionError, SizeLimitError
from opfree.mcx import (
    CumulantFunction,
    MomentSource,
    OpWord,
    closed_form_k2,
    closed_form_k3,
    cumulants_to_moments,
    eta_functional,
    k_pi_evaluate,
    moments_to_cumulants,
    xi_functional,
)
from opfree.ncpart import NcPartition, enumerate_nc


def scalar_sequence_source(moments):
    """Single-variable scalar moments ``m_n`` times the coefficient product."""

    def mu(word):
        coeff = np.prod([c[0, 0] for c in word.coeffs]) if word.coeffs else 1.0
        return np.array([[moments[len(word) - 1] * coeff]])

    return MomentSource(mu, 1)


def scalar_cumulant(values):
    def k(word):
        coeff = np.prod([c[0, 0] for c in word.coeffs]) if word.coeffs else 1.0
        return np.array([[values.get(len(word), 0.0) * coeff]])

    return k


SEMI = scalar_sequence_source([semicircle_moment(n) for n in range(1, 9)])


def test_opword_defaults_and_validation():
    w = OpWord((0, 1, 2), dim=2)
    assert len(w.coeffs) == 2 and np.array_equal(w.coeffs[0], np.eye(2))
    with pytest.raises(DimensionError):
        OpWord((0, 1), [np.eye(2), np.eye(2)])
    with pytest.raises(ValueError):
        OpWord(())
    assert OpWord.from_right_form((0, 1), [np.eye(2)]).key() == OpWord((0, 1), [np.eye(2)]).key()


def test_first_and_second_order_relations():
    k = scalar_cumulant({1: 0.7, 2: 1.9})
    assert cumulants_to_moments(OpWord((0,)), k)[0, 0] == pytest.approx(0.7)
    assert cumulants_to_moments(OpWord((0, 0)), k)[0, 0] == pytest.approx(1.9 + 0.49)


def test_only_second_cumulant_gives_catalan_fourth_moment():
    k = scalar_cumulant({2: 1.0})
    assert cumulants_to_moments(OpWord((0,) * 4), k)[0, 0] == pytest.approx(2.0)
    assert cumulants_to_moments(OpWord((0,) * 6), k)[0, 0] == pytest.approx(5.0)


def test_k_pi_nested_block_uses_inner_cumulant_as_coefficient():
    rng = np.random.default_rng(1)
    k = product_form_functional(rng, 2, 3, 3)
    word = random_word(rng, 3, 3, 2)
    b1, b2 = word.coeffs
    pi = NcPartition.from_blocks([(1, 3), (2,)])
    inner = k(OpWord((word.elements[1],), dim=2))
    expected = k(OpWord((word.elements[0], word.elements[2]), [b1 @ inner @ b2], 2))
    assert np.allclose(k_pi_evaluate(pi, word, k), expected, atol=1e-12)


def test_k_pi_singletons_and_full_block():
    rng = np.random.default_rng(2)
    k = product_form_functional(rng, 2, 3, 3)
    word = random_word(rng, 3, 3, 2)
    b1, b2 = word.coeffs
    ks = [k(OpWord((e,), dim=2)) for e in word.elements]
    singletons = NcPartition.from_blocks([(1,), (2,), (3,)])
    assert np.allclose(k_pi_evaluate(singletons, word, k), ks[0] @ b1 @ ks[1] @ b2 @ ks[2])
    full = NcPartition.from_blocks([(1, 2, 3)])
    assert np.allclose(k_pi_evaluate(full, word, k), k(word))


def test_k_pi_accepts_block_lists_and_rejects_crossing():
    k = scalar_cumulant({2: 1.0})
    assert k_pi_evaluate([(1, 4), (2, 3)], OpWord((0,) * 4), k)[0, 0] == 1.0
    with pytest.raises(CrossingPartitionError):
        k_pi_evaluate([(1, 3), (2, 4)], OpWord((0,) * 4), k)


def test_scalar_examples():
    source = scalar_sequence_source([1.0, 3.0])
    assert moments_to_cumulants(OpWord((0, 0)), source)[0, 0] == pytest.approx(2.0)
    assert closed_form_k2(source, 0, 0)[0, 0] == pytest.approx(2.0)
    source = scalar_sequence_source([0.0, 1.0, 0.0])
    assert moments_to_cumulants(OpWord((0, 0, 0)), source)[0, 0] == pytest.approx(0.0)
    assert closed_form_k3(source, 0, 0, 0)[0, 0] == pytest.approx(0.0)


def test_semicircular_cumulants_vanish_beyond_two():
    for n in range(1, 9):
        value = moments_to_cumulants(OpWord((0,) * n), SEMI)[0, 0]
        assert value == pytest.approx(1.0 if n == 2 else 0.0, abs=1e-12)


def test_free_poisson_cumulants_are_one():
    # s^2 has moments Catalan(n); all its free cumulants equal 1
    source = scalar_sequence_source([semicircle_moment(2 * n) for n in range(1, 7)])
    for n in range(1, 7):
        assert moments_to_cumulants(OpWord((0,) * n), source)[0, 0] == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=6))
def test_single_variable_cumulants_match_generating_recursion(moments):
    source = scalar_sequence_source(moments)
    oracle = scalar_cumulants_oracle(moments)
    for n in range(1, len(moments) + 1):
        got = moments_to_cumulants(OpWord((0,) * n), source)[0, 0]
        assert got == pytest.approx(oracle[n - 1], abs=1e-9 * (1 + abs(oracle[n - 1])))


@pytest.mark.parametrize("dim,max_order", [(1, 5), (2, 4)])
def test_roundtrip_product_form_cumulants(dim, max_order):
    rng = np.random.default_rng(10 + dim)
    k = product_form_functional(rng, dim, 2, max_order)
    mu = moments_from_cumulants(k, dim)
    cf = CumulantFunction(mu, dim)
    for n in range(1, max_order + 1):
        for _ in range(3):
            w = random_word(rng, n, 2, dim)
            assert np.allclose(cf(w), k(w), atol=1e-12 * (1 + np.abs(k(w)).max()))


def test_roundtrip_from_moments_side():
    rng = np.random.default_rng(3)
    mu = MomentSource(product_form_functional(rng, 2, 2, 4), 2)
    cf = CumulantFunction(mu, 2)
    for n in range(1, 5):
        w = random_word(rng, n, 2, 2)
        assert np.allclose(cumulants_to_moments(w, cf), mu(w), atol=1e-11)


def test_closed_forms_match_generic_inversion_on_matrix_systems():
    rng = np.random.default_rng(4)
    mu = MomentSource(product_form_functional(rng, 2, 3, 3), 2)
    assert np.allclose(closed_form_k2(mu, 0, 1, dim=2), moments_to_cumulants(OpWord((0, 1), dim=2), mu))
    assert np.allclose(closed_form_k3(mu, 0, 1, 2, dim=2),
                       moments_to_cumulants(OpWord((0, 1, 2), dim=2), mu))


def test_order_three_inversion_by_partition_subtraction():
    # brute force: k3 = mu3 - sum over the four proper NC(3) partitions
    rng = np.random.default_rng(5)
    mu = MomentSource(product_form_functional(rng, 2, 3, 3), 2)
    cf = CumulantFunction(mu, 2)
    w = OpWord((0, 1, 2), dim=2)
    proper = sum(k_pi_evaluate(pi, w, cf) for pi in enumerate_nc(3) if len(pi) > 1)
    assert np.allclose(closed_form_k3(mu, 0, 1, 2, dim=2), mu(w) - proper)


def test_xi_and_eta_for_standard_semicircular():
    one = np.eye(1)
    assert xi_functional(1, (0, 0), [one], SEMI)[0, 0] == pytest.approx(1.0)
    assert xi_functional(2, (0, 0, 0), [one, one], SEMI)[0, 0] == pytest.approx(0.0)
    assert eta_functional(1, (0, 0), [one], SEMI)[0, 0] == pytest.approx(1.0)
    assert eta_functional(3, (0,) * 4, [one] * 3, SEMI)[0, 0] == pytest.approx(2.0)
    assert eta_functional(2, (0,) * 3, [one] * 2, SEMI)[0, 0] == 0.0
    with pytest.raises(DimensionError):
        xi_functional(2, (0, 0), [one], SEMI)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=1, max_size=4))
def test_scalar_coefficients_factor_out(bs):
    source = scalar_sequence_source([0.3, 1.2, -0.4, 2.5, 0.8])
    p = len(bs)
    got = xi_functional(p, (0,) * (p + 1), [np.array([[b]]) for b in bs], source)[0, 0]
    ones = xi_functional(p, (0,) * (p + 1), [np.eye(1)] * p, source)[0, 0]
    assert got == pytest.approx(np.prod(bs) * ones, abs=1e-9)


def test_multilinear_in_each_coefficient():
    rng = np.random.default_rng(6)
    mu = MomentSource(product_form_functional(rng, 2, 1, 4), 2)
    b = [rng.standard_normal((2, 2)) for _ in range(3)]
    c = rng.standard_normal((2, 2))
    f = lambda bs: xi_functional(3, (0,) * 4, bs, mu)  # noqa: E731
    lhs = f([b[0], b[1] + 2.5 * c, b[2]])
    rhs = f(b) + 2.5 * f([b[0], c, b[2]])
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_cumulant_cache_is_reused():
    calls = []

    def mu(word):
        calls.append(word)
        return np.array([[semicircle_moment(len(word))]])

    cf = CumulantFunction(MomentSource(mu, 1), 1)
    cf(OpWord((0,) * 5))
    first = len(calls)
    cf(OpWord((0,) * 5))
    assert len(calls) == first and cf.cache_size() >= 5


def test_size_guard():
    with pytest.raises(SizeLimitError):
        moments_to_cumulants(OpWord((0,) * 13), SEMI)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_k_pi_multiplicative_across_a_gap(n):
    rng = np.random.default_rng(20 + n)
    k = product_form_functional(rng, 2, 2, n)
    word = random_word(rng, n, 2, 2)
    for g in range(1, n):
        left = OpWord(word.elements[:g], word.coeffs[:g - 1], 2)
        right = OpWord(word.elements[g:], word.coeffs[g:], 2)
        for p1 in enumerate_nc(g):
            for p2 in enumerate_nc(n - g):
                blocks = list(p1.blocks) + [tuple(x + g for x in b) for b in p2.blocks]
                whole = k_pi_evaluate(blocks, word, k)
                split = k_pi_evaluate(p1, left, k) @ word.coeffs[g - 1] @ k_pi_evaluate(p2, right, k)
                assert np.allclose(whole, split, atol=1e-10)
