"""
Closed-form moments of semicircular (free) and Gaussian (classical) families.

Both evaluators sum products of pairwise covariances over pairings of the
word positions: the free one over non-crossing pairings only, the
classical one over all pairings.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .exceptions import DimensionError, SizeLimitError
from .ncpart import MAX_PAIRING_N, ncpp_pairs, pairing_pairs

__all__ = [
    "CovarianceSpec",
    "StarWord",
    "free_wick_moment",
    "classical_wick_moment",
    "circular_star_moment",
    "expand_star_word",
]


@dataclass(frozen=True, eq=False)
class CovarianceSpec:
    """Named selfadjoint variables with ``cov[i, j] = phi(x_i x_j)``."""

    names: tuple
    cov: np.ndarray

    def __post_init__(self):
        cov = np.array(self.cov, dtype=float)
        names = tuple(self.names)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise DimensionError(f"covariance must be square, got shape {cov.shape}")
        if len(names) != cov.shape[0]:
            raise DimensionError(f"{len(names)} names for a {cov.shape[0]}x{cov.shape[0]} covariance")
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        if np.max(np.abs(cov - cov.T), initial=0.0) > 1e-12:
            raise ValueError("covariance is not symmetric")
        if cov.size and np.linalg.eigvalsh(cov).min() < -1e-10:
            raise ValueError("covariance is not positive semidefinite")
        cov.setflags(write=False)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "names", names)

    @classmethod
    def identity(cls, m, prefix="x"):
        return cls(tuple(f"{prefix}{i + 1}" for i in range(m)), np.eye(m))

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(data["names"]), np.asarray(data["cov"], dtype=float))

    def to_dict(self):
        return {"names": list(self.names), "cov": self.cov.tolist()}

    @property
    def size(self):
        return len(self.names)

    def index(self, var):
        if isinstance(var, str):
            try:
                return self.names.index(var)
            except ValueError:
                raise IndexError(f"unknown variable {var!r}") from None
        i = int(var)
        if not 0 <= i < self.size:
            raise IndexError(f"variable index {i} out of range for {self.size} variables")
        return i

    def factor(self):
        """Rows ``f_i`` with ``<f_i, f_j> = cov[i, j]``: generator vectors
        for a Fock realization of the family."""
        w, v = np.linalg.eigh(self.cov)
        return v * np.sqrt(np.clip(w, 0.0, None))


def _resolve(word, spec):
    word = [spec.index(v) for v in word]
    if len(word) > MAX_PAIRING_N:
        raise SizeLimitError(f"word length {len(word)} exceeds the size guard {MAX_PAIRING_N}")
    return word


def _pairing_sum(word, cov, pairings):
    total = 0.0
    for pairing in pairings:
        term = 1.0
        for a, b in pairing:
            term *= cov[word[a - 1], word[b - 1]]
            if term == 0.0:
                break
        total += term
    return total


def free_wick_moment(word, spec: CovarianceSpec) -> float:
    """``phi(x_i1 ... x_ip)`` for a semicircular family (0-Wick formula)."""
    word = _resolve(word, spec)
    if not word or len(word) % 2:
        return 1.0 if not word else 0.0
    return float(_pairing_sum(word, spec.cov, ncpp_pairs(len(word))))


def classical_wick_moment(word, spec: CovarianceSpec) -> float:
    """``E[X_i1 ... X_ip]`` for a centered Gaussian family (Wick formula)."""
    word = _resolve(word, spec)
    if not word or len(word) % 2:
        return 1.0 if not word else 0.0
    return float(_pairing_sum(word, spec.cov, pairing_pairs(len(word))))


@dataclass(frozen=True)
class StarWord:
    """A word in ``c_j`` and ``c_j*``: ``(index, starred)`` letters."""

    letters: tuple

    def __post_init__(self):
        letters = tuple((int(i), bool(s)) for i, s in self.letters)
        if any(i < 0 for i, _ in letters):
            raise IndexError("negative variable index in star word")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text):
        """Parse whitespace separated letters such as ``"0* 0 1*"``."""
        letters = []
        for tok in text.split():
            star = tok.endswith("*")
            letters.append((int(tok.rstrip("*")), star))
        return cls(tuple(letters))

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return " ".join(f"{i}{'*' if s else ''}" for i, s in self.letters)


def expand_star_word(word: StarWord):
    """Yield ``(coefficient, real_word)`` with ``c_j = s_2j + i s_2j+1``.

    Real-part indices are 0-based: ``c_j`` has real part ``2j`` and
    imaginary part ``2j + 1``.
    """
    choices = []
    for j, star in word.letters:
        choices.append(((2 * j, 1.0 + 0j), (2 * j + 1, -1j if star else 1j)))
    for picks in product(*choices):
        coeff = 1.0 + 0j
        for _, c in picks:
            coeff *= c
        yield coeff, [v for v, _ in picks]


def circular_star_moment(word: StarWord, c_spec: CovarianceSpec) -> complex:
    """``phi`` of a product of complex semicirculars and their adjoints.

    ``c_spec`` is the covariance of the real and imaginary parts, ordered
    ``Re c_0, Im c_0, Re c_1, ...``; its normalization is the caller's.
    """
    if c_spec.size % 2:
        raise DimensionError("c_spec must describe real/imaginary pairs (even size)")
    n_complex = c_spec.size // 2
    for j, _ in word.letters:
        if j >= n_complex:
            raise IndexError(f"variable index {j} out of range for {n_complex} complex variables")
    if len(word) > MAX_PAIRING_N:
        raise SizeLimitError(f"word length {len(word)} exceeds the size guard {MAX_PAIRING_N}")
    if len(word) % 2:
        return 0j
    total = 0j
    for coeff, real_word in expand_star_word(word):
        total += coeff * free_wick_moment(real_word, c_spec)
    return complex(total)
