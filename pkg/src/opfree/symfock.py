"""
Cyclic coefficient matrices showing that symmetric tensor powers reach
every elementary tensor ``A a_1 (x) ... (x) a_n``.

With ``A_j = E_{j,j+1} (x) I_m`` (indices mod ``n``), ``B_1 = (I_n (x) A) A_1``
and ``B_j = A_j`` for ``j >= 2``, the coefficient products
``B_sigma(1) ... B_sigma(n)`` vanish unless ``sigma`` is a cyclic shift of the
identity. The shift starting at ``r`` gives ``E_rr (x) A``, so compressing
by the corner ``E_11 (x) I_m`` keeps exactly ``sigma = identity``.

Block ``(k, l)`` of ``M_n(M_m)`` is embedded as ``kron(E_kl, M)``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import permutations, product

import numpy as np

from .exceptions import SizeLimitError
from .matrices import as_square, matrix_unit, max_abs
from .report import FAIL, PASS, Report, digest

__all__ = [
    "CyclicCoefficients",
    "build_cyclic_coefficients",
    "permutation_product",
    "corner_projection",
    "is_cyclic_shift",
    "tensor_power_coefficient",
    "verify_symmetrization",
]

MAX_SYMMETRIZATION_N = 6


@dataclass(frozen=True, eq=False)
class CyclicCoefficients:
    n: int
    m: int
    A: np.ndarray
    As: tuple
    Bs: tuple


def build_cyclic_coefficients(n, m, A) -> CyclicCoefficients:
    if n < 2:
        raise ValueError("the cyclic construction needs n >= 2")
    if m < 1:
        raise ValueError("inner matrix size m must be positive")
    A = as_square(A, m)
    eye_m = np.eye(m, dtype=complex)
    As = tuple(np.kron(matrix_unit(n, j, j % n + 1), eye_m) for j in range(1, n + 1))
    B1 = np.kron(np.eye(n), A) @ As[0]
    return CyclicCoefficients(n, m, A, As, (B1,) + As[1:])


def permutation_product(sigma, cc: CyclicCoefficients) -> np.ndarray:
    """``B_sigma(1) ... B_sigma(n)`` for ``sigma`` given 1-based."""
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(1, cc.n + 1)):
        raise ValueError(f"{sigma} is not a permutation of 1..{cc.n}")
    out = np.eye(cc.n * cc.m, dtype=complex)
    for j in sigma:
        out = out @ cc.Bs[j - 1]
    return out


def corner_projection(n, m):
    """``E_11 (x) I_m``."""
    return np.kron(matrix_unit(n, 1, 1), np.eye(m))


def is_cyclic_shift(sigma):
    """Start index ``r`` if ``sigma = (r, r+1, .., n, 1, .., r-1)``, else None."""
    n = len(sigma)
    r = sigma[0]
    if all(sigma[i] == (r - 1 + i) % n + 1 for i in range(n)):
        return r
    return None


def tensor_power_coefficient(word, cc: CyclicCoefficients) -> np.ndarray:
    """Coefficient ``B_w1 ... B_wn`` of ``a_w1 (x) ... (x) a_wn`` in the n-fold
    tensor power of ``sum_j B_j a_j``; coefficients move across the tensor
    signs freely, so only their ordered product matters."""
    out = np.eye(cc.n * cc.m, dtype=complex)
    for j in word:
        if not 1 <= j <= cc.n:
            raise ValueError(f"letter {j} out of range 1..{cc.n}")
        out = out @ cc.Bs[j - 1]
    return out


def verify_symmetrization(n, m, A, tol=0.0, all_words=False) -> Report:
    """Check the corner-compressed invariant for every ``sigma`` in ``S_n``.

    Per permutation the report records whether
    ``(E_11 (x) I_m) B_sigma(1)..B_sigma(n)`` equals ``E_11 (x) A`` for the
    identity and 0 otherwise (the invariant), and separately whether the
    uncompressed product itself vanishes for ``sigma != identity``. The
    latter fails for every nontrivial cyclic shift, whose product is
    ``E_rr (x) A``; those permutations are listed as ``nonzero_uncompressed``.
    """
    t0 = time.perf_counter()
    if not 2 <= n <= MAX_SYMMETRIZATION_N:
        raise SizeLimitError(f"symmetrization check supports 2 <= n <= {MAX_SYMMETRIZATION_N}")
    cc = build_cyclic_coefficients(n, m, A)
    corner = corner_projection(n, m)
    target = np.kron(matrix_unit(n, 1, 1), cc.A)
    report = Report("symfock", environment={"n": n, "m": m, "tol": tol})
    worst, nonzero, shift_errors = 0.0, [], 0.0
    identity = tuple(range(1, n + 1))
    for sigma in permutations(identity):
        prod_ = permutation_product(sigma, cc)
        expected = target if sigma == identity else 0.0
        worst = max(worst, max_abs(corner @ prod_ - expected))
        r = is_cyclic_shift(sigma)
        if r is not None:
            shift_errors = max(shift_errors,
                               max_abs(prod_ - np.kron(matrix_unit(n, r, r), cc.A)))
        elif max_abs(prod_) != 0.0:
            shift_errors = max(shift_errors, max_abs(prod_))
        if sigma != identity and max_abs(prod_) > tol:
            nonzero.append(list(sigma))
    d = digest(n, m, cc.A)
    report.add_bound("corner-compressed invariant", worst, tol, d)
    report.add_bound("cyclic shifts give E_rr (x) A, others 0", shift_errors, tol, d)
    # the uncompressed products are nonzero exactly for the nontrivial
    # cyclic shifts (when A != 0); anything else would be a new finding
    expected = [
        list(s) for s in permutations(identity)
        if s != identity and is_cyclic_shift(s) is not None
    ] if max_abs(cc.A) > tol else []
    report.add(
        "uncompressed products nonzero exactly at nontrivial cyclic shifts",
        PASS if nonzero == expected else FAIL,
        float(len(nonzero)),
        None,
        d,
        uncompressed_vanish_off_identity=not nonzero,
        nonzero_uncompressed=nonzero,
    )
    if all_words:
        worst_w = 0.0
        for word in product(range(1, n + 1), repeat=n):
            coeff = corner @ tensor_power_coefficient(word, cc)
            expected = target if word == identity else 0.0
            worst_w = max(worst_w, max_abs(coeff - expected))
        report.add_bound("corner coefficient of a_1 (x) .. (x) a_n is A", worst_w, tol, d)
    report.wall_time = time.perf_counter() - t0
    return report
