"""Deterministic enumeration streams driving the solver search loops.

All streams are lazy, duplicate-free, and fully determined by their
inputs, so solver runs are reproducible and iteration counts can be
checked against closed forms (binomials, powers, ordered Bell numbers).
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from math import comb

from .errors import TooFewAnchors


@dataclass(frozen=True)
class OrderedPartition:
    """Disjoint non-empty parts, order significant.

    Built from a ground multiset: duplicate values collapse inside each
    part, so parts are plain node sets (and may repeat values across parts
    only if the ground itself never did — position groups stay disjoint).
    """

    parts: tuple[frozenset[int], ...]

    @property
    def r(self) -> int:
        return len(self.parts)


def subsets_up_to(universe: Iterable[int], max_size: int) -> Iterator[frozenset[int]]:
    """Every subset of size <= max_size, smallest sizes first, lexicographic."""
    if max_size < 0:
        raise ValueError("max_size must be >= 0")
    items = sorted(set(universe))
    for size in range(min(max_size, len(items)) + 1):
        for combo in itertools.combinations(items, size):
            yield frozenset(combo)


def count_subsets_up_to(n: int, max_size: int) -> int:
    return sum(comb(n, i) for i in range(min(max_size, n) + 1))


def tuples_with_replacement(universe: Iterable[int], length: int) -> Iterator[tuple[int, ...]]:
    """All |universe|^length tuples, lexicographic over the sorted universe."""
    if length < 0:
        raise ValueError("length must be >= 0")
    yield from itertools.product(sorted(set(universe)), repeat=length)


def ordered_partitions(
    ground: Iterable[int], max_parts: int, first_part_min: int = 0
) -> Iterator[OrderedPartition]:
    """Ordered partitions of a ground multiset into r <= max_parts parts.

    Positions of the ground are assigned to parts (every part non-empty),
    values inside a part are collapsed to a set, and partitions that come
    out identical after collapsing are emitted once. The first part must
    keep at least ``first_part_min`` distinct values.
    """
    items = tuple(ground)
    if not items:
        return
    seen: set[tuple[frozenset[int], ...]] = set()
    for r in range(1, max_parts + 1):
        if r > len(items):
            break
        for assign in itertools.product(range(r), repeat=len(items)):
            if len(set(assign)) != r:
                continue
            parts = tuple(
                frozenset(items[i] for i, a in enumerate(assign) if a == p)
                for p in range(r)
            )
            if len(parts[0]) < first_part_min:
                continue
            if parts in seen:
                continue
            seen.add(parts)
            yield OrderedPartition(parts)


def anchor_pairs(parts_so_far: Iterable[frozenset[int]]) -> Iterator[tuple[int, int]]:
    """All ordered pairs of distinct nodes from the union of the given parts."""
    union: set[int] = set()
    for part in parts_so_far:
        union.update(part)
    if len(union) < 2:
        raise TooFewAnchors(f"anchor pool {sorted(union)} has fewer than 2 nodes")
    pool = sorted(union)
    for s in pool:
        for t in pool:
            if s != t:
                yield (s, t)


def ordered_bell(i: int) -> int:
    """Ordered Bell number via B(i) = sum_j C(i,j) B(i-j), B(0) = 1."""
    if i < 0:
        raise ValueError("ordered Bell numbers need i >= 0")
    memo = [1]
    for n in range(1, i + 1):
        memo.append(sum(comb(n, j) * memo[n - j] for j in range(1, n + 1)))
    return memo[i]
