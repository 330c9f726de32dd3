"""Dense complex matrix helpers standing in for elements of ``M_k(C)``."""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionError

DEFAULT_TOL = 1e-10


def as_square(m, dim=None):
    """Coerce to a complex ``k x k`` array, checking the dimension."""
    a = np.atleast_2d(np.asarray(m, dtype=complex))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise DimensionError(f"expected dimension {dim}, got {a.shape[0]}")
    return a


def max_abs(m) -> float:
    """Max-entry modulus, the package-wide norm for zero tests."""
    a = np.asarray(m)
    return float(np.max(np.abs(a))) if a.size else 0.0


def is_selfadjoint(m, tol=1e-12) -> bool:
    a = np.asarray(m)
    return max_abs(a - a.conj().T) <= tol


def allclose(a, b, tol=DEFAULT_TOL) -> bool:
    return max_abs(np.asarray(a) - np.asarray(b)) <= tol


def matrix_unit(k, r, s):
    """``E_rs`` in ``M_k``, 1-based indices."""
    e = np.zeros((k, k), dtype=complex)
    e[r - 1, s - 1] = 1.0
    return e


def random_selfadjoint(rng, k, scale=None):
    """Gaussian-entry complex matrix symmetrized as ``(M + M*) / 2``.

    Entries default to variance ``1/k`` so the operator norm stays O(1)
    for every ``k``.
    """
    if scale is None:
        scale = 1.0 / np.sqrt(k)
    m = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    m *= scale / np.sqrt(2.0)
    return (m + m.conj().T) / 2.0


def random_complex(rng, k, scale=None):
    if scale is None:
        scale = 1.0 / np.sqrt(k)
    m = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    return m * scale / np.sqrt(2.0)


def real_part(a):
    """Selfadjoint real part ``(A + A*) / 2``."""
    a = np.asarray(a)
    return (a + a.conj().T) / 2.0


def imag_part(a):
    """Selfadjoint imaginary part ``(A - A*) / 2i``."""
    a = np.asarray(a)
    return (a - a.conj().T) / 2.0j


def trial_rng(seed, trial):
    """Independent random stream for one trial of a seeded run."""
    return np.random.default_rng([int(seed), int(trial)])
