from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import semicircle_moment
from opfree.wick import (
    CovarianceSpec,
    StarWord,
    circular_star_moment,
    classical_wick_moment,
    expand_star_word,
    free_wick_moment,
)

HALF = CovarianceSpec(("re", "im"), np.diag([0.5, 0.5]))


def _all_pairings(points):
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    for i, other in enumerate(rest):
        for tail in _all_pairings(rest[:i] + rest[i + 1:]):
            yield [(first, other)] + tail


def _crosses(pairing):
    for (a, c), (b, d) in combinations(sorted(pairing), 2):
        if a < b < c < d:
            return True
    return False


def _wick_oracle(word, cov, free):
    total = 0.0
    for pairing in _all_pairings(list(range(len(word)))):
        if free and _crosses(pairing):
            continue
        total += np.prod([cov[word[a], word[b]] for a, b in pairing])
    return total


def test_free_examples():
    one = CovarianceSpec.identity(1)
    two = CovarianceSpec.identity(2)
    assert free_wick_moment([0] * 4, one) == 2.0
    assert free_wick_moment([0, 1, 0, 1], two) == 0.0
    assert free_wick_moment([0, 1, 0], two) == 0.0
    assert free_wick_moment([], two) == 1.0


def test_classical_examples():
    one = CovarianceSpec.identity(1)
    two = CovarianceSpec.identity(2)
    assert classical_wick_moment([0] * 4, one) == 3.0
    assert classical_wick_moment([0, 1, 0, 1], two) == 1.0
    assert classical_wick_moment([0] * 6, one) == 15.0
    assert classical_wick_moment([0] * 5, one) == 0.0


def test_names_resolve():
    spec = CovarianceSpec(("a", "b"), np.array([[1.0, 0.5], [0.5, 2.0]]))
    assert free_wick_moment(["a", "b"], spec) == 0.5
    with pytest.raises(IndexError):
        free_wick_moment(["c"], spec)


@pytest.mark.parametrize("n", range(0, 12, 2))
def test_single_variable_sequences(n):
    one = CovarianceSpec.identity(1)
    assert free_wick_moment([0] * n, one) == semicircle_moment(n)
    assert classical_wick_moment([0] * n, one) == np.prod(range(n - 1, 0, -2))


def _random_psd(rng, m):
    g = rng.standard_normal((m, m))
    return g @ g.T


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=0, max_size=8), st.integers(0, 1000))
def test_wick_formulas_match_pairing_enumeration(word, seed):
    cov = _random_psd(np.random.default_rng(seed), 3)
    spec = CovarianceSpec(("x", "y", "z"), cov)
    assert free_wick_moment(word, spec) == pytest.approx(_wick_oracle(word, cov, True), abs=1e-9)
    assert classical_wick_moment(word, spec) == pytest.approx(
        _wick_oracle(word, cov, False), abs=1e-9)


def test_covariance_validation():
    with pytest.raises(ValueError):
        CovarianceSpec(("a", "b"), [[1.0, 0.2], [0.3, 1.0]])
    with pytest.raises(ValueError):
        CovarianceSpec(("a",), [[-1.0]])
    with pytest.raises(ValueError):
        CovarianceSpec(("a", "a"), np.eye(2))
    spec = CovarianceSpec.from_dict({"names": ["a", "b"], "cov": [[2, 1], [1, 2]]})
    assert CovarianceSpec.from_dict(spec.to_dict()).names == ("a", "b")
    f = spec.factor()
    assert np.allclose(f @ f.T, spec.cov)


def test_star_word_parse():
    w = StarWord.parse("0* 0 1*")
    assert w.letters == ((0, True), (0, False), (1, True))
    assert str(w) == "0* 0 1*" and len(w) == 3


def test_circular_examples():
    assert circular_star_moment(StarWord.parse("0* 0"), HALF) == pytest.approx(1.0)
    assert circular_star_moment(StarWord.parse("0 0"), HALF) == pytest.approx(0.0)
    assert circular_star_moment(StarWord.parse("0* 0 0* 0"), HALF) == pytest.approx(2.0)


def test_star_expansion_has_two_to_the_length_terms():
    terms = list(expand_star_word(StarWord.parse("0* 0 0* 0")))
    assert len(terms) == 16
    assert sum(c * free_wick_moment(w, HALF) for c, w in terms) == pytest.approx(2.0)


def test_circular_star_moments_by_matrix_model_oracle():
    # c* c moments of a circular element: phi((c*c)^n) = Catalan(n), and
    # phi((c* c)^n) = phi((c c*)^n)
    for n in range(1, 4):
        word = StarWord(tuple(((0, True), (0, False)) * n))
        alt = StarWord(tuple(((0, False), (0, True)) * n))
        assert circular_star_moment(word, HALF) == pytest.approx(semicircle_moment(2 * n))
        assert circular_star_moment(alt, HALF) == pytest.approx(semicircle_moment(2 * n))


def test_circular_moments_vanish_unless_balanced():
    for letters in product([(0, True), (0, False)], repeat=4):
        stars = sum(s for _, s in letters)
        value = circular_star_moment(StarWord(letters), HALF)
        if stars != 2:
            assert abs(value) < 1e-12
