"""
Set partitions, non-crossing partitions and pairings of ``{1, ..., n}``.

Partitions are stored in canonical form: every block is a sorted tuple and
blocks are ordered by their minimum. Non-crossing partitions additionally
carry their nesting forest, which is what nested cumulant evaluation
consumes: block ``b`` is a child of block ``a`` when ``b`` sits strictly
between two consecutive elements of ``a`` and ``a`` is the innermost block
with that property.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

from .exceptions import CrossingPartitionError, SizeLimitError

__all__ = [
    "MAX_SET_PARTITION_N",
    "MAX_NC_N",
    "MAX_PAIRING_N",
    "SetPartition",
    "NcPartition",
    "enumerate_set_partitions",
    "is_noncrossing",
    "enumerate_nc",
    "enumerate_ncpp",
    "enumerate_pairings",
    "bell_number",
    "catalan_number",
    "double_factorial",
]

MAX_SET_PARTITION_N = 12
MAX_NC_N = 12
MAX_PAIRING_N = 14


def _check_size(n, limit, what):
    if not isinstance(n, int) or n < 1:
        raise SizeLimitError(f"{what}: n must be a positive integer, got {n!r}")
    if n > limit:
        raise SizeLimitError(f"{what}: n={n} exceeds the size guard {limit}")


@dataclass(frozen=True)
class SetPartition:
    """A partition of ``{1, ..., n}`` in canonical form."""

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        blocks = tuple(sorted(blocks, key=lambda b: b[0] if b else 0))
        object.__setattr__(self, "blocks", blocks)
        seen = [x for b in blocks for x in b]
        if any(len(b) == 0 for b in blocks):
            raise ValueError("blocks must be nonempty")
        if sorted(seen) != list(range(1, self.n + 1)):
            raise ValueError(
                f"blocks {blocks} do not partition {{1..{self.n}}}"
            )

    @classmethod
    def from_blocks(cls, blocks):
        blocks = [tuple(b) for b in blocks]
        n = sum(len(b) for b in blocks)
        return cls(n, tuple(blocks))

    def block_of(self):
        """Map from element to the index of its block."""
        out = {}
        for i, b in enumerate(self.blocks):
            for x in b:
                out[x] = i
        return out

    def is_pairing(self):
        return all(len(b) == 2 for b in self.blocks)

    def __len__(self):
        return len(self.blocks)

    def __str__(self):
        return "{" + ",".join("(" + ",".join(map(str, b)) + ")" for b in self.blocks) + "}"


def is_noncrossing(p: SetPartition) -> bool:
    """Return False iff some ``a < b < c < d`` has ``a, c`` in one block and
    ``b, d`` in another."""
    owner = p.block_of()
    # Stack scan: a partition is non-crossing iff, reading left to right,
    # every block that is re-entered is the most recently opened open block.
    remaining = {i: len(b) for i, b in enumerate(p.blocks)}
    stack = []
    for x in range(1, p.n + 1):
        i = owner[x]
        if stack and stack[-1] == i:
            pass
        elif i in stack:
            return False
        else:
            stack.append(i)
        remaining[i] -= 1
        if remaining[i] == 0:
            stack.pop()
    return True


def _is_noncrossing_bruteforce(p: SetPartition) -> bool:
    owner = p.block_of()
    n = p.n
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            for c in range(b + 1, n + 1):
                if owner[a] != owner[c] or owner[a] == owner[b]:
                    continue
                for d in range(c + 1, n + 1):
                    if owner[b] == owner[d]:
                        return False
    return True


def _nesting_forest(blocks):
    """Parent index (or None) for every block of a non-crossing partition."""
    parents = []
    for j, beta in enumerate(blocks):
        lo, hi = beta[0], beta[-1]
        best, best_left = None, 0
        for i, alpha in enumerate(blocks):
            if i == j:
                continue
            left = [a for a in alpha if a < lo]
            if not left or not any(a > hi for a in alpha):
                continue
            # innermost cover = the one whose gap starts closest to beta
            if left[-1] > best_left:
                best, best_left = i, left[-1]
        parents.append(best)
    return tuple(parents)


@dataclass(frozen=True)
class NcPartition:
    """A non-crossing partition together with its nesting forest.

    ``forest[i]`` is the index of the parent block of ``base.blocks[i]``,
    or ``None`` for a root (outermost) block.
    """

    base: SetPartition
    forest: tuple = field(default=None, compare=False)

    def __post_init__(self):
        if not is_noncrossing(self.base):
            raise CrossingPartitionError(f"partition {self.base} is crossing")
        if self.forest is None:
            object.__setattr__(self, "forest", _nesting_forest(self.base.blocks))

    @classmethod
    def from_blocks(cls, blocks):
        return cls(SetPartition.from_blocks(blocks))

    @property
    def n(self):
        return self.base.n

    @property
    def blocks(self):
        return self.base.blocks

    def roots(self):
        return [i for i, p in enumerate(self.forest) if p is None]

    def children(self, i):
        return [j for j, p in enumerate(self.forest) if p == i]

    def postorder(self):
        """Block indices with every child before its parent, left to right."""
        order = []

        def visit(i):
            for c in self.children(i):
                visit(c)
            order.append(i)

        for r in self.roots():
            visit(r)
        return order

    def is_interval(self):
        return all(b[-1] - b[0] + 1 == len(b) for b in self.blocks)

    def __len__(self):
        return len(self.base.blocks)

    def __str__(self):
        return str(self.base)


def _set_partitions(n):
    # restricted growth strings
    out = []

    def rec(i, blocks):
        if i > n:
            out.append(SetPartition(n, tuple(tuple(b) for b in blocks)))
            return
        for b in blocks:
            b.append(i)
            rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        rec(i + 1, blocks)
        blocks.pop()

    rec(1, [])
    return out


def enumerate_set_partitions(n: int) -> list[SetPartition]:
    """All ``Bell(n)`` set partitions of ``{1..n}``, canonical, no duplicates."""
    _check_size(n, MAX_SET_PARTITION_N, "enumerate_set_partitions")
    return _set_partitions(n)


@lru_cache(maxsize=None)
def _nc_partitions(n):
    out = []

    def rec(i, blocks):
        if i > n:
            out.append(NcPartition(SetPartition(n, tuple(tuple(b) for b in blocks))))
            return
        for k, b in enumerate(blocks):
            top = b[-1]
            # joining b keeps the partition non-crossing iff no other block
            # straddles max(b)
            if any(c[0] < top < c[-1] for j, c in enumerate(blocks) if j != k):
                continue
            b.append(i)
            rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        rec(i + 1, blocks)
        blocks.pop()

    rec(1, [])
    return tuple(out)


def enumerate_nc(n: int) -> list[NcPartition]:
    """All non-crossing partitions of ``{1..n}`` (``Catalan(n)`` of them)."""
    _check_size(n, MAX_NC_N, "enumerate_nc")
    return list(_nc_partitions(n))


@lru_cache(maxsize=None)
def _ncpp(n):
    if n == 0:
        return ((),)
    out = []
    for j in range(2, n + 1, 2):
        for inner in _ncpp(j - 2):
            for outer in _ncpp(n - j):
                blocks = [(1, j)]
                blocks += [(a + 1, b + 1) for a, b in inner]
                blocks += [(a + j, b + j) for a, b in outer]
                out.append(tuple(sorted(blocks)))
    return tuple(out)


def enumerate_ncpp(n: int) -> list[NcPartition]:
    """Non-crossing pair partitions of ``{1..n}``; empty for odd ``n``."""
    _check_size(n, MAX_PAIRING_N, "enumerate_ncpp")
    if n % 2:
        return []
    return [NcPartition(SetPartition(n, blocks)) for blocks in _ncpp(n)]


@lru_cache(maxsize=None)
def _pairings(elems):
    if not elems:
        return ((),)
    first, rest = elems[0], elems[1:]
    out = []
    for k, partner in enumerate(rest):
        others = rest[:k] + rest[k + 1:]
        for sub in _pairings(others):
            out.append(((first, partner),) + sub)
    return tuple(out)


def enumerate_pairings(n: int) -> list[SetPartition]:
    """All pair partitions of ``{1..n}``, crossing ones included."""
    _check_size(n, MAX_PAIRING_N, "enumerate_pairings")
    if n % 2:
        return []
    return [SetPartition(n, p) for p in _pairings(tuple(range(1, n + 1)))]


def ncpp_pairs(n):
    """Pairs of every NC pairing of ``{1..n}`` as plain tuples (hot path)."""
    if n % 2:
        return ()
    _check_size(n, MAX_PAIRING_N, "ncpp_pairs")
    return _ncpp(n)


def pairing_pairs(n):
    """Pairs of every pairing of ``{1..n}`` as plain tuples (hot path)."""
    if n % 2:
        return ()
    _check_size(n, MAX_PAIRING_N, "pairing_pairs")
    return _pairings(tuple(range(1, n + 1)))


@lru_cache(maxsize=None)
def bell_number(n: int) -> int:
    if n == 0:
        return 1
    return sum(comb(n - 1, k) * bell_number(k) for k in range(n))


@lru_cache(maxsize=None)
def catalan_number(n: int) -> int:
    if n == 0:
        return 1
    return sum(catalan_number(k) * catalan_number(n - 1 - k) for k in range(n))


def double_factorial(n: int) -> int:
    """``n!!``; by convention ``(-1)!! = 0!! = 1``."""
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out
