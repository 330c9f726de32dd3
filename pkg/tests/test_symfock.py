from itertools import permutations

import numpy as np
import pytest

from opfree.matrices import matrix_unit
from opfree.symfock import (
    build_cyclic_coefficients,
    corner_projection,
    is_cyclic_shift,
    permutation_product,
    tensor_power_coefficient,
    verify_symmetrization,
)


def test_coefficient_examples():
    cc = build_cyclic_coefficients(2, 1, [[2.0]])
    assert np.allclose(cc.Bs[0], 2 * matrix_unit(2, 1, 2))
    assert np.allclose(cc.Bs[1], matrix_unit(2, 2, 1))
    cc = build_cyclic_coefficients(3, 1, [[1.0]])
    for b, (r, s) in zip(cc.Bs, [(1, 2), (2, 3), (3, 1)]):
        assert np.allclose(b, matrix_unit(3, r, s))
    assert not build_cyclic_coefficients(3, 2, np.zeros((2, 2))).Bs[0].any()


def test_products_by_permutation_type():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((2, 2))
    cc = build_cyclic_coefficients(3, 2, A)
    assert np.allclose(permutation_product((1, 2, 3), cc), np.kron(matrix_unit(3, 1, 1), A))
    assert np.allclose(permutation_product((2, 3, 1), cc), np.kron(matrix_unit(3, 2, 2), A))
    assert not permutation_product((2, 1, 3), cc).any()


def test_swap_gives_lower_corner():
    A = np.array([[1.0, 2.0], [3.0, 4.0]])
    cc = build_cyclic_coefficients(2, 2, A)
    assert np.allclose(permutation_product((2, 1), cc), np.kron(matrix_unit(2, 2, 2), A))
    rep = verify_symmetrization(2, 2, A)
    unc = rep.checks[2].details
    assert not unc["uncompressed_vanish_off_identity"]
    assert unc["nonzero_uncompressed"] == [[2, 1]]
    assert rep.passed


@pytest.mark.parametrize("n", range(2, 6))
def test_cyclic_shift_detection(n):
    shifts = [s for s in permutations(range(1, n + 1)) if is_cyclic_shift(s) is not None]
    assert len(shifts) == n
    assert is_cyclic_shift(tuple(range(1, n + 1))) == 1


@pytest.mark.parametrize("n,m", [(3, 1), (4, 2), (5, 2)])
def test_corner_isolates_identity(n, m):
    rng = np.random.default_rng(n + m)
    A = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    rep = verify_symmetrization(n, m, A, all_words=True)
    assert rep.passed
    assert all(c.value == 0.0 for c in rep.checks if c.threshold is not None)


def test_corner_coefficient_of_tensor_power():
    A = np.array([[0.0, 1.0], [1.0, 1.0]])
    cc = build_cyclic_coefficients(3, 2, A)
    P = corner_projection(3, 2)
    assert np.allclose(P @ tensor_power_coefficient((1, 2, 3), cc), np.kron(matrix_unit(3, 1, 1), A))
    assert not (P @ tensor_power_coefficient((1, 1, 2), cc)).any()


def test_invalid_inputs():
    with pytest.raises(ValueError):
        build_cyclic_coefficients(1, 1, [[1.0]])
    cc = build_cyclic_coefficients(3, 1, [[1.0]])
    with pytest.raises(ValueError):
        permutation_product((1, 1, 2), cc)
