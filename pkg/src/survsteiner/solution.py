"""Shared result types for solvers and oracles."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction


class ProblemKind(str, Enum):
    """The four problems the package solves."""

    CYCLE = "cycle"
    TWO_NCS = "2ncs"
    TWO_ECS = "2ecs"
    KFST = "kfst"


@dataclass(frozen=True)
class Solution:
    """An edge subset of an input graph together with its total cost.

    ``optimal`` is True for the exact solvers; the scaling-based weighted
    solvers return ``optimal=False`` with ``ratio_bound = 1 + eps``.
    ``certificate`` is an optional JSON-able structural witness (cycle node
    order, ear decomposition, or condensed block tree with protected paths).
    """

    edges: frozenset[int]
    cost: Fraction
    optimal: bool = True
    ratio_bound: Fraction | None = None
    certificate: dict | None = None

    @property
    def size(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> tuple[int, ...]:
        return tuple(sorted(self.edges))


@dataclass
class SolveStats:
    """Mutable run accounting filled in by the solvers.

    ``iterations`` counts every visited configuration of the outer
    enumeration (including ones skipped after a failed subcall), so tests
    can compare it against closed-form counts. ``updates`` records
    ``(iteration, incumbent weight)`` pairs; the weight sequence is
    non-increasing by construction.
    """

    iterations: int = 0
    subcalls: dict[str, int] = field(default_factory=dict)
    updates: list[tuple[int, int]] = field(default_factory=list)
    eta: Fraction | None = None
    eta_per_call: Fraction | None = None
    epsilon: Fraction | None = None
    seed: int | None = None
    threads: int = 1
    elapsed_ms: int = 0
    threshold_index: int | None = None
    beta: Fraction | None = None
    mu: Fraction | None = None
    subdivided_nodes: int | None = None
    notes: dict = field(default_factory=dict)

    def count(self, name: str, inc: int = 1) -> None:
        self.subcalls[name] = self.subcalls.get(name, 0) + inc
