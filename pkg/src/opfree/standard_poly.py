"""
Standard polynomials ``s_d(X_1..X_d) = sum_sigma sgn(sigma) X_sigma(1) ... X_sigma(d)``
and the Amitsur-Levitzki identity ``s_2n = 0`` on ``M_n``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from .exceptions import DimensionError, SizeLimitError
from .matrices import DEFAULT_TOL, as_square, matrix_unit, max_abs, random_complex, trial_rng
from .report import Report, digest

__all__ = [
    "MAX_DEGREE",
    "StandardPolyInstance",
    "standard_polynomial",
    "standard_polynomial_bruteforce",
    "permutation_sign",
    "verify_al_vanishing",
    "find_nonvanishing_witness",
]

MAX_DEGREE = 8


@dataclass(frozen=True, eq=False)
class StandardPolyInstance:
    degree: int
    arguments: tuple
    labels: tuple = ()

    def __post_init__(self):
        if len(self.arguments) != self.degree:
            raise ValueError(f"{len(self.arguments)} arguments for degree {self.degree}")

    def value(self):
        return standard_polynomial(list(self.arguments))


def permutation_sign(perm) -> int:
    """Sign of a permutation given as a sequence of distinct integers."""
    sign, seen = 1, set()
    perm = list(perm)
    pos = {v: i for i, v in enumerate(sorted(perm))}
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = pos[perm[j]]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _check_args(args):
    args = [as_square(a) for a in args]
    d = len(args)
    if d == 0:
        raise ValueError("standard polynomial of degree 0 is undefined here")
    if d > MAX_DEGREE:
        raise SizeLimitError(f"degree {d} exceeds the guard {MAX_DEGREE}")
    k = args[0].shape[0]
    if any(a.shape != (k, k) for a in args):
        raise DimensionError("arguments must share one dimension")
    return args


def standard_polynomial(args) -> np.ndarray:
    """``s_d`` by expansion along the first factor, memoized over subsets.

    ``s(T) = sum_{i in T} (-1)^{rank of i in T} X_i s(T minus i)``, so each of
    the ``2^d`` subsets is evaluated once.
    """
    args = _check_args(args)
    d = len(args)
    k = args[0].shape[0]
    memo = {0: np.eye(k, dtype=complex)}
    for mask in range(1, 1 << d):
        total = np.zeros((k, k), dtype=complex)
        rank = 0
        for i in range(d):
            if mask >> i & 1:
                sub = memo[mask & ~(1 << i)]
                term = args[i] @ sub
                total += -term if rank % 2 else term
                rank += 1
        memo[mask] = total
    return memo[(1 << d) - 1]


def standard_polynomial_bruteforce(args) -> np.ndarray:
    """Direct ``d!``-term sum; the oracle for :func:`standard_polynomial`."""
    args = _check_args(args)
    k = args[0].shape[0]
    total = np.zeros((k, k), dtype=complex)
    for perm in permutations(range(len(args))):
        term = np.eye(k, dtype=complex)
        for i in perm:
            term = term @ args[i]
        total += permutation_sign(perm) * term
    return total


def verify_al_vanishing(n, trials=100, seed=0, tol=DEFAULT_TOL):
    """``max ||s_2n(X_1..X_2n)||`` over random complex ``M_n`` tuples."""
    t0 = time.perf_counter()
    if not 1 <= n <= 3:
        raise SizeLimitError(f"Amitsur-Levitzki check supports 1 <= n <= 3, got {n}")
    report = Report("al", environment={"seed": seed, "tol": tol, "trials": trials, "n": n})
    worst, ds = 0.0, []
    for t in range(trials):
        rng = trial_rng(seed, t)
        args = [random_complex(rng, n, scale=1.0) for _ in range(2 * n)]
        ds.append(digest(seed, t))
        worst = max(worst, max_abs(standard_polynomial(args)))
    report.add_bound(f"s_{2 * n} vanishes on M_{n}", worst, tol, digest(*ds))
    report.wall_time = time.perf_counter() - t0
    return report


def _unit_product(units):
    """Product of matrix units ``(r, s)`` as a unit or None when it is zero."""
    r, s = units[0]
    for a, b in units[1:]:
        if a != s:
            return None
        s = b
    return r, s


def _s_on_units(units):
    """``s_d`` of matrix units as ``{(r, s): coefficient}``."""
    out = {}
    d = len(units)

    def rec(prefix, remaining):
        # prune as soon as the partial product chain breaks
        if prefix and _unit_product([units[i] for i in prefix]) is None:
            return
        if not remaining:
            key = _unit_product([units[i] for i in prefix])
            out[key] = out.get(key, 0) + permutation_sign(prefix)
            return
        for i in remaining:
            rec(prefix + [i], [j for j in remaining if j != i])

    rec([], list(range(d)))
    return {k: v for k, v in out.items() if v != 0}


def find_nonvanishing_witness(n, degree=None):
    """First tuple of matrix units on which ``s_degree`` (default ``2n - 1``)
    is nonzero, or None.

    ``s_d`` is alternating, so tuples with a repeated unit vanish and
    reordering a tuple only flips the sign; the search therefore runs over
    sets of distinct units in lexicographic order.
    """
    if not 1 <= n <= 3:
        raise SizeLimitError(f"witness search supports 1 <= n <= 3, got {n}")
    d = 2 * n - 1 if degree is None else degree
    units = [(r, s) for r in range(1, n + 1) for s in range(1, n + 1)]
    for combo in combinations(units, d):
        if _s_on_units(list(combo)):
            args = tuple(matrix_unit(n, r, s) for r, s in combo)
            labels = tuple(f"E{r}{s}" for r, s in combo)
            return StandardPolyInstance(d, args, labels)
    return None
