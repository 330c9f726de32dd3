"""
Truncated full (free) and bosonic Fock spaces with ladder operators.

The free basis consists of the words of length ``0..depth`` over the mode
alphabet ``0..modes-1``; the empty word is the vacuum. Creation prepends a
letter and maps the top level to zero; annihilation strips the leading
letter. With that convention the truncated creation and annihilation
matrices are exact adjoints of each other.

The bosonic basis consists of occupation tuples with total occupation at
most ``cutoff``, in lexicographic order, so the vacuum has index 0.

Each operator records a ``degree``: the most levels it can move a vector.
A product of operators whose degrees add up to at most the truncation
depth has an exact vacuum expectation; :func:`vacuum_expectation` refuses
anything longer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import comb
from numbers import Number

import numpy as np
import scipy.sparse as sp

from .exceptions import DimensionError, TruncationError

__all__ = [
    "FreeFockBasis",
    "BosonBasis",
    "FockOperator",
    "creation_free",
    "annihilation_free",
    "gaussian_free",
    "creation_bosonic",
    "annihilation_bosonic",
    "gaussian_bosonic",
    "vacuum_expectation",
    "free_family",
    "bosonic_family",
]


@dataclass(frozen=True)
class FreeFockBasis:
    """Words of length ``0..depth`` over ``modes`` letters."""

    modes: int
    depth: int
    words: tuple = field(init=False, repr=False, compare=False)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.modes < 1 or self.depth < 0:
            raise DimensionError(f"invalid free Fock basis: modes={self.modes}, depth={self.depth}")
        words = []
        for level in range(self.depth + 1):
            words.extend(product(range(self.modes), repeat=level))
        object.__setattr__(self, "words", tuple(words))
        object.__setattr__(self, "_index", {w: i for i, w in enumerate(words)})

    kind = "free"

    @property
    def size(self):
        return len(self.words)

    @property
    def cutoff(self):
        return self.depth

    def index(self, word):
        return self._index[tuple(word)]

    def level(self, i):
        return len(self.words[i])


@dataclass(frozen=True)
class BosonBasis:
    """Occupation tuples ``(n_1..n_m)`` with ``sum n_i <= cutoff``."""

    modes: int
    cutoff: int
    states: tuple = field(init=False, repr=False, compare=False)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.modes < 1 or self.cutoff < 0:
            raise DimensionError(f"invalid boson basis: modes={self.modes}, cutoff={self.cutoff}")
        states = sorted(
            s for s in product(range(self.cutoff + 1), repeat=self.modes) if sum(s) <= self.cutoff
        )
        assert len(states) == comb(self.cutoff + self.modes, self.modes)
        object.__setattr__(self, "states", tuple(states))
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(states)})

    kind = "bosonic"

    @property
    def size(self):
        return len(self.states)

    @property
    def depth(self):
        return self.cutoff

    def index(self, state):
        return self._index[tuple(state)]


class FockOperator:
    """Sparse operator on a truncated Fock basis."""

    def __init__(self, matrix, basis, degree=1):
        matrix = sp.csr_matrix(matrix, dtype=complex)
        if matrix.shape != (basis.size, basis.size):
            raise DimensionError(
                f"matrix shape {matrix.shape} does not match basis size {basis.size}"
            )
        self.matrix = matrix
        self.basis = basis
        self.degree = int(degree)

    @property
    def kind(self):
        return self.basis.kind

    def _check(self, other):
        if other.basis != self.basis:
            raise DimensionError("operators live on different Fock bases")

    def adjoint(self):
        return FockOperator(self.matrix.conj().T, self.basis, self.degree)

    @property
    def H(self):
        return self.adjoint()

    def __add__(self, other):
        self._check(other)
        return FockOperator(self.matrix + other.matrix, self.basis, max(self.degree, other.degree))

    def __sub__(self, other):
        self._check(other)
        return FockOperator(self.matrix - other.matrix, self.basis, max(self.degree, other.degree))

    def __neg__(self):
        return FockOperator(-self.matrix, self.basis, self.degree)

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return FockOperator(self.matrix * scalar, self.basis, self.degree)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return FockOperator(self.matrix / scalar, self.basis, self.degree)

    def __matmul__(self, other):
        self._check(other)
        return FockOperator(self.matrix @ other.matrix, self.basis, self.degree + other.degree)

    def __pow__(self, k):
        out = self
        for _ in range(k - 1):
            out = out @ self
        return out

    def apply(self, vec):
        return self.matrix @ vec

    def toarray(self):
        return self.matrix.toarray()

    def is_selfadjoint(self, tol=1e-12):
        diff = self.matrix - self.matrix.conj().T
        return (abs(diff).max() if diff.nnz else 0.0) <= tol

    def __repr__(self):
        return f"FockOperator({self.kind}, size={self.basis.size}, degree={self.degree})"


def _coerce_vector(f, modes):
    f = np.asarray(f)
    if np.iscomplexobj(f):
        if np.any(f.imag != 0):
            raise ValueError("Fock generator vectors must be real")
        f = f.real
    f = np.asarray(f, dtype=float).ravel()
    if f.shape != (modes,):
        raise DimensionError(f"vector of length {f.size} for {modes} modes")
    return f


def _check_nontrivial(basis):
    if basis.depth < 1:
        raise DimensionError("ladder operators need a basis of depth at least 1")


def creation_free(f, basis: FreeFockBasis) -> FockOperator:
    """``a*(f) w = sum_i f_i (i w)``; words at the top level map to 0."""
    _check_nontrivial(basis)
    f = _coerce_vector(f, basis.modes)
    rows, cols, vals = [], [], []
    for col, w in enumerate(basis.words):
        if len(w) >= basis.depth:
            continue
        for i in np.flatnonzero(f):
            rows.append(basis.index((int(i),) + w))
            cols.append(col)
            vals.append(f[i])
    m = sp.coo_matrix((vals, (rows, cols)), shape=(basis.size, basis.size))
    return FockOperator(m, basis)


def annihilation_free(f, basis: FreeFockBasis) -> FockOperator:
    """``a(f) (i w) = f_i w`` and ``a(f) Omega = 0``."""
    _check_nontrivial(basis)
    f = _coerce_vector(f, basis.modes)
    rows, cols, vals = [], [], []
    for col, w in enumerate(basis.words):
        if not w or f[w[0]] == 0:
            continue
        rows.append(basis.index(w[1:]))
        cols.append(col)
        vals.append(f[w[0]])
    m = sp.coo_matrix((vals, (rows, cols)), shape=(basis.size, basis.size))
    return FockOperator(m, basis)


def gaussian_free(f, basis: FreeFockBasis) -> FockOperator:
    """``G_0(f) = a(f) + a*(f)``, a semicircular element in the vacuum state."""
    return annihilation_free(f, basis) + creation_free(f, basis)


def creation_bosonic(f, basis: BosonBasis) -> FockOperator:
    """``sum_i f_i a_i^dagger`` with ``sqrt(n_i + 1)`` ladder factors."""
    _check_nontrivial(basis)
    f = _coerce_vector(f, basis.modes)
    rows, cols, vals = [], [], []
    for col, s in enumerate(basis.states):
        if sum(s) >= basis.cutoff:
            continue
        for i in np.flatnonzero(f):
            t = list(s)
            t[i] += 1
            rows.append(basis.index(t))
            cols.append(col)
            vals.append(f[i] * np.sqrt(t[i]))
    m = sp.coo_matrix((vals, (rows, cols)), shape=(basis.size, basis.size))
    return FockOperator(m, basis)


def annihilation_bosonic(f, basis: BosonBasis) -> FockOperator:
    _check_nontrivial(basis)
    f = _coerce_vector(f, basis.modes)
    rows, cols, vals = [], [], []
    for col, s in enumerate(basis.states):
        for i in np.flatnonzero(f):
            if s[i] == 0:
                continue
            t = list(s)
            t[i] -= 1
            rows.append(basis.index(t))
            cols.append(col)
            vals.append(f[i] * np.sqrt(s[i]))
    m = sp.coo_matrix((vals, (rows, cols)), shape=(basis.size, basis.size))
    return FockOperator(m, basis)


def gaussian_bosonic(f, basis: BosonBasis) -> FockOperator:
    """``G_1(f)``, Gaussian distributed in the vacuum state."""
    return annihilation_bosonic(f, basis) + creation_bosonic(f, basis)


def vacuum_vector(basis):
    v = np.zeros(basis.size, dtype=complex)
    v[0] = 1.0
    return v


def check_exact(ops, basis=None):
    """Raise unless the product of ``ops`` is exact on their common basis."""
    if basis is None:
        basis = ops[0].basis
    for op in ops:
        if op.basis != basis:
            raise DimensionError("operators live on different Fock bases")
    total = sum(op.degree for op in ops)
    if total > basis.depth:
        raise TruncationError(
            f"product of total degree {total} exceeds truncation depth {basis.depth}; "
            "the vacuum expectation would not be exact"
        )


def vacuum_expectation(ops) -> complex:
    """``<Omega, T_1 ... T_p Omega>`` by applying the operators right to left."""
    ops = list(ops)
    if not ops:
        return 1.0 + 0j
    check_exact(ops)
    v = vacuum_vector(ops[0].basis)
    for op in reversed(ops):
        v = op.matrix @ v
    return complex(v[0])


def free_family(spec, depth):
    """Semicircular family ``G_0(f_i)`` with ``<f_i, f_j> = spec.cov[i, j]``."""
    basis = FreeFockBasis(spec.size, depth)
    return [gaussian_free(f, basis) for f in spec.factor()]


def bosonic_family(spec, cutoff):
    """Gaussian family ``G_1(f_i)`` with ``<f_i, f_j> = spec.cov[i, j]``."""
    basis = BosonBasis(spec.size, cutoff)
    return [gaussian_bosonic(f, basis) for f in spec.factor()]
