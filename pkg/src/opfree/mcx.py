"""
Operator-valued moment <-> cumulant transforms over non-crossing partitions.

A word ``a_1 (x) b_1 a_2 (x) ... (x) b_{n-1} a_n`` is an :class:`OpWord`: the
element handles ``a_i`` plus the ``B``-coefficients ``b_i`` placed
immediately *left* of element ``i + 1``. ``B`` is ``M_k(C)``; scalar words
use ``1 x 1`` coefficients.

Moments are supplied by a *moment source*, any callable mapping an
``OpWord`` to a ``k x k`` array (the conditional expectation of the
interleaved product). Cumulant functions have the same signature.

Nested evaluation of ``k_pi``
-----------------------------
``k_pi[word]`` is evaluated innermost block first. Once every child of a
block has been evaluated the block occupies consecutive positions of the
reduced word; its cumulant ``K`` is computed and the block is removed, the
coefficients on either side merging into ``b_left @ K @ b_right``. The
reduced word carries outer coefficients (identity at the start), so a
block at the start or end of the word simply multiplies on that side, and
disjoint outer blocks multiply left to right with the coefficient between
them in the middle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, SizeLimitError
from .matrices import as_square
from .ncpart import MAX_NC_N, NcPartition, SetPartition, enumerate_nc

__all__ = [
    "OpWord",
    "MomentSource",
    "CumulantFunction",
    "cumulants_to_moments",
    "k_pi_evaluate",
    "moments_to_cumulants",
    "xi_functional",
    "eta_functional",
    "closed_form_k2",
    "closed_form_k3",
]


@dataclass(frozen=True, eq=False, init=False)
class OpWord:
    """Element handles with interleaved ``B``-coefficients.

    ``coeffs[i]`` sits between ``elements[i]`` and ``elements[i + 1]``.
    Coefficients default to the identity of dimension ``dim``.
    """

    elements: tuple
    coeffs: tuple
    dim: int

    def __init__(self, elements, coeffs=None, dim=None):
        elements = tuple(elements)
        if not elements:
            raise ValueError("an OpWord needs at least one element")
        if coeffs is None:
            coeffs = ()
        coeffs = list(coeffs)
        if dim is None:
            dim = np.atleast_2d(coeffs[0]).shape[0] if coeffs else 1
        if not coeffs:
            coeffs = [np.eye(dim, dtype=complex)] * (len(elements) - 1)
        if len(coeffs) != len(elements) - 1:
            raise DimensionError(
                f"{len(elements)} elements need {len(elements) - 1} coefficients, "
                f"got {len(coeffs)}"
            )
        coeffs = tuple(as_square(c, dim) for c in coeffs)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "dim", int(dim))

    @classmethod
    def from_right_form(cls, elements, coeffs, dim=None):
        """Build from ``X_0 b_1 (x) X_1 b_2 (x) ...``.

        Over ``(x)_B`` a coefficient right of element ``i`` is the same as
        one left of element ``i + 1``, so the data carry over unchanged.
        """
        return cls(elements, coeffs, dim)

    def __len__(self):
        return len(self.elements)

    def key(self):
        """Hashable identity used for memoization."""
        return (
            self.elements,
            tuple(np.ascontiguousarray(c).tobytes() for c in self.coeffs),
        )

    def with_coeff(self, i, b):
        coeffs = list(self.coeffs)
        coeffs[i] = b
        return OpWord(self.elements, coeffs, self.dim)

    def __repr__(self):
        return f"OpWord(elements={self.elements!r}, dim={self.dim})"


class MomentSource:
    """Wraps a callable ``OpWord -> k x k array`` as a moment source."""

    def __init__(self, evaluate, dim=1):
        self._evaluate = evaluate
        self.dim = dim

    def evaluate(self, word):
        return as_square(self._evaluate(word), self.dim)

    def __call__(self, word):
        return self.evaluate(word)


def _check_order(n):
    if n > MAX_NC_N:
        raise SizeLimitError(f"word length {n} exceeds the size guard {MAX_NC_N}")


def _as_nc(pi):
    if isinstance(pi, NcPartition):
        return pi
    if isinstance(pi, SetPartition):
        return NcPartition(pi)
    return NcPartition.from_blocks(pi)


def k_pi_evaluate(pi, word: OpWord, cumulant_fn) -> np.ndarray:
    """Nested product of cumulants ``k_pi[word]``.

    ``pi`` may be an :class:`NcPartition`, a :class:`SetPartition` or a list
    of blocks; crossing partitions raise ``CrossingPartitionError``.
    """
    pi = _as_nc(pi)
    n = len(word)
    if pi.n != n:
        raise DimensionError(f"partition of {pi.n} points applied to a word of length {n}")
    dim = word.dim
    eye = np.eye(dim, dtype=complex)
    pos = list(range(1, n + 1))
    elems = list(word.elements)
    gaps = [eye, *word.coeffs, eye]
    for bi in pi.postorder():
        block = pi.blocks[bi]
        s = pos.index(block[0])
        e = s + len(block)
        if pos[s:e] != list(block):
            raise RuntimeError(f"block {block} is not contiguous after reduction")
        K = as_square(cumulant_fn(OpWord(elems[s:e], gaps[s + 1:e], dim)), dim)
        if not K.any():
            return np.zeros((dim, dim), dtype=complex)
        merged = gaps[s] @ K @ gaps[e]
        del pos[s:e]
        del elems[s:e]
        gaps[s:e + 1] = [merged]
    return gaps[0]


class CumulantFunction:
    """Memoized operator-valued free cumulants of a moment source.

    ``k^(n)(word) = mu^(n)(word) - sum_{pi != 1_n} k_pi[word]``, recursing
    on strictly shorter words. The cache is keyed by element handles and
    coefficient bytes; concurrent callers at worst recompute an entry.
    """

    def __init__(self, moment_source, dim=None):
        self.moment_source = moment_source
        self.dim = dim if dim is not None else getattr(moment_source, "dim", 1)
        self._cache = {}

    def __call__(self, word: OpWord) -> np.ndarray:
        key = word.key()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        n = len(word)
        _check_order(n)
        value = as_square(self.moment_source(word), word.dim).copy()
        for pi in enumerate_nc(n):
            if len(pi) == 1:
                continue
            value -= k_pi_evaluate(pi, word, self)
        self._cache[key] = value
        return value

    def cache_size(self):
        return len(self._cache)


def cumulants_to_moments(word: OpWord, cumulant_fn) -> np.ndarray:
    """``mu^(n)(word) = sum_{pi in NC(n)} k_pi[word]``."""
    n = len(word)
    _check_order(n)
    cache = {}

    def cached(w):
        key = w.key()
        if key not in cache:
            cache[key] = as_square(cumulant_fn(w), w.dim)
        return cache[key]

    total = np.zeros((word.dim, word.dim), dtype=complex)
    for pi in enumerate_nc(n):
        total += k_pi_evaluate(pi, word, cached)
    return total


def moments_to_cumulants(word: OpWord, moment_source) -> np.ndarray:
    """Free cumulant ``k^(n)(word)`` from moments, memoized per call."""
    return CumulantFunction(moment_source, word.dim)(word)


def _functional_word(indices, b_args, dim):
    indices = tuple(indices)
    b_args = list(b_args)
    if len(indices) != len(b_args) + 1:
        raise DimensionError(
            f"order-{len(b_args)} functional needs {len(b_args) + 1} indices, got {len(indices)}"
        )
    return OpWord(indices, b_args, dim)


def xi_functional(p, indices, b_args, moment_source) -> np.ndarray:
    """``xi_p(b_1..b_p) = k^(p+1)(X_i0 (x) b_1 X_i1 (x) ... (x) b_p X_ip)``.

    ``p = 0`` is the first cumulant of a single element.
    ``moment_source`` may also be a :class:`CumulantFunction`, whose cache is
    then reused.
    """
    if len(b_args) != p:
        raise DimensionError(f"xi_{p} takes {p} coefficient arguments, got {len(b_args)}")
    dim = getattr(moment_source, "dim", 1)
    word = _functional_word(indices, b_args, dim)
    if isinstance(moment_source, CumulantFunction):
        return moment_source(word)
    return moments_to_cumulants(word, moment_source)


def eta_functional(p, indices, b_args, moment_source) -> np.ndarray:
    """``eta_p(b_1..b_p) = mu^(p+1)(X_i0 (x) b_1 X_i1 (x) ... (x) b_p X_ip)``."""
    if len(b_args) != p:
        raise DimensionError(f"eta_{p} takes {p} coefficient arguments, got {len(b_args)}")
    if isinstance(moment_source, CumulantFunction):
        moment_source = moment_source.moment_source
    dim = getattr(moment_source, "dim", 1)
    return as_square(moment_source(_functional_word(indices, b_args, dim)), dim)


def closed_form_k2(moment_source, a1, a2, dim=1):
    """``k^(2)(a1 (x) a2) = mu(a1 a2) - mu(a1) mu(a2)``."""
    mu = moment_source
    return mu(OpWord((a1, a2), dim=dim)) - mu(OpWord((a1,), dim=dim)) @ mu(OpWord((a2,), dim=dim))


def closed_form_k3(moment_source, a1, a2, a3, dim=1):
    """Third cumulant from moments of order at most three.

    The middle correction term is ``mu^(2)(a1 (x) mu^(1)(a2) a3)``; the
    nested first moment of ``a2`` is the coefficient between ``a1`` and
    ``a3``.
    """
    mu = moment_source

    def m(*els, coeffs=None):
        return mu(OpWord(els, coeffs, dim))

    m1, m2, m3 = m(a1), m(a2), m(a3)
    return (
        m(a1, a2, a3)
        - m1 @ m(a2, a3)
        - m(a1, a3, coeffs=[m2])
        - m(a1, a2) @ m3
        + 2 * m1 @ m2 @ m3
    )
