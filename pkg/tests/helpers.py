"""Shared oracles and random systems for the tests."""

from itertools import product

import numpy as np

from opfree.mcx import MomentSource, OpWord, cumulants_to_moments


def product_form_functional(rng, dim, n_elements, max_order):
    """Random multilinear functionals ``R_0 b_1 R_1 ... b_{n-1} R_{n-1}``.

    ``R_j`` depends on the order, the position and the element handle, so
    different words get unrelated values. Used as a cumulant system.
    """
    tables = {}
    for n in range(1, max_order + 1):
        for pos in range(n):
            for e in range(n_elements):
                tables[n, pos, e] = (rng.standard_normal((dim, dim))
                                     + 1j * rng.standard_normal((dim, dim)))

    def fn(word):
        n = len(word)
        out = tables[n, 0, word.elements[0]]
        for pos in range(1, n):
            out = out @ word.coeffs[pos - 1] @ tables[n, pos, word.elements[pos]]
        return out

    return fn


def moments_from_cumulants(cumulant_fn, dim):
    return MomentSource(lambda w: cumulants_to_moments(w, cumulant_fn), dim)


def random_word(rng, n, n_elements, dim):
    elements = tuple(int(e) for e in rng.integers(0, n_elements, size=n))
    coeffs = [rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
              for _ in range(n - 1)]
    return OpWord(elements, coeffs, dim)


def scalar_cumulants_oracle(moments):
    """Free cumulants of one variable from ``m_1..m_n`` via
    ``m_n = sum_s k_s sum_{i_1+..+i_s = n-s} m_i1 .. m_is`` (``m_0 = 1``)."""
    m = [1.0] + list(moments)
    k = [0.0]
    for n in range(1, len(m)):
        rest = 0.0
        for s in range(1, n):
            for parts in product(range(n - s + 1), repeat=s):
                if sum(parts) == n - s:
                    rest += k[s] * np.prod([m[i] for i in parts])
        k.append(m[n] - rest)
    return k[1:]


def semicircle_moment(n):
    """``phi(s^n)`` for a standard semicircular: Catalan numbers on even n."""
    if n % 2:
        return 0.0
    from math import comb
    return comb(n, n // 2) / (n // 2 + 1)
