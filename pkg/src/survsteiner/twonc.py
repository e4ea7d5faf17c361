"""Exact minimum 2-node-connected Steiner subgraphs, and their FPTAS.

The unweighted solver walks a three-level search space: candidate sets S
of would-be degree-3 nodes (size at most 2k-4 by the structure bound, or
2k with ``wide_subsets``), ordered partitions of T union S whose first
part keeps at least two nodes, and one anchor pair per later part drawn
from the union of earlier parts. Every configuration assembles a
candidate subgraph: a minimum Steiner cycle through the first part (three
nodes or more, since the target subgraph needs them) unioned with a
minimum Steiner path per later part between its anchors. The smallest
feasible candidate wins; ties break to the lexicographically smallest
edge-id set.

The iteration counter counts every (S, partition, anchor vector) point
exactly once, including points skipped wholesale after a failed or
hopeless subcall (those are added in bulk), so it always equals the
closed-form sum of anchor-pair products over all subsets and partitions.

Subcall results are memoized by their arguments; with integer edge
weights the same machinery solves the rounded-and-subdivided weighted
instance without ever materialising subdivision chains.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .cycles import (
    CycleSolverParams,
    SolverKind,
    min_steiner_cycle,
    min_steiner_path,
    search_min_cycle,
    search_min_path,
)
from .enumeration import OrderedPartition, ordered_partitions, subsets_up_to
from .errors import Infeasible, NoCycle, NoPath, SubcallFailed
from .graph import Graph, exact_fraction, is_2nc, subgraph_nodes
from .scaling import build_scaling_gadget, prefix_feasible, record_gadget
from .solution import ProblemKind, Solution, SolveStats


@dataclass(frozen=True)
class MarkerConfiguration:
    """One point of the search space.

    ``markers`` is S; the partition covers T union S with the first part
    of size >= 2; ``anchors`` holds one (s, t) pair per part after the
    first, each drawn from the union of the parts before it.
    """

    markers: frozenset[int]
    partition: OrderedPartition
    anchors: tuple[tuple[int, int], ...]

    def validate(self) -> None:
        parts = self.partition.parts
        if not parts or len(parts[0]) < 2:
            raise ValueError("first part must hold at least two marker nodes")
        if len(self.anchors) != len(parts) - 1:
            raise ValueError("need exactly one anchor pair per part after the first")
        pool = set(parts[0])
        for i, (s, t) in enumerate(self.anchors):
            if s == t:
                raise ValueError(f"anchor pair {i}: endpoints coincide")
            if s not in pool or t not in pool:
                raise ValueError(f"anchor pair {i}: endpoint outside earlier parts")
            pool |= parts[i + 1]


_MISS = object()


class _Subcalls:
    """Memoized cycle/path subcalls over one graph and weight vector."""

    def __init__(
        self,
        g: Graph,
        weights: dict[int, int] | None,
        params: CycleSolverParams | None,
        eta_per_call: Fraction,
        stats: SolveStats,
    ):
        self.g = g
        self.w = [1] * g.m
        if weights:
            for eid, val in weights.items():
                self.w[eid] = val
        self.weights = weights
        self.params = params
        self.eta_per_call = eta_per_call
        self.stats = stats
        self.cycles: dict[frozenset[int], tuple[int, frozenset[int]] | None] = {}
        self.paths: dict[tuple[frozenset[int], int, int], tuple[int, frozenset[int]] | None] = {}

    def _plugin_params(self) -> CycleSolverParams | None:
        p = self.params
        if p is None or p.solver_kind is not SolverKind.PLUGIN:
            return None
        return CycleSolverParams(
            eta=self.eta_per_call,
            seed=p.seed,
            solver_kind=SolverKind.PLUGIN,
            plugin=p.plugin,
            threads=p.threads,
        )

    def _weigh(self, edges: frozenset[int]) -> int:
        return sum(self.w[eid] for eid in edges)

    def cycle(self, part: frozenset[int]) -> tuple[int, frozenset[int]] | None:
        hit = self.cycles.get(part, _MISS)
        if hit is not _MISS:
            return hit
        plug = self._plugin_params()
        result: tuple[int, frozenset[int]] | None
        try:
            if plug is not None:
                sol = min_steiner_cycle(self.g, part, plug)
                edges = sol.edges
                if len(subgraph_nodes(self.g, edges)) < 3:
                    # the target subgraph needs >= 3 nodes; redo exhaustively
                    _, eids, _ = search_min_cycle(
                        self.g, part, weights=self.weights, min_nodes=3
                    )
                    edges = frozenset(eids)
                result = (self._weigh(edges), edges)
            else:
                total, eids, _ = search_min_cycle(
                    self.g, part, weights=self.weights, min_nodes=3
                )
                result = (total, frozenset(eids))
            self.stats.count("cycle_calls")
        except (NoCycle, SubcallFailed):
            self.stats.count("cycle_calls")
            result = None
        self.cycles[part] = result
        return result

    def path(self, part: frozenset[int], s: int, t: int) -> tuple[int, frozenset[int]] | None:
        key = (part, s, t)
        hit = self.paths.get(key, _MISS)
        if hit is not _MISS:
            return hit
        plug = self._plugin_params()
        result: tuple[int, frozenset[int]] | None
        try:
            if plug is not None:
                sol = min_steiner_path(self.g, part, s, t, plug)
                result = (self._weigh(sol.edges), sol.edges)
            else:
                total, eids = search_min_path(self.g, part, s, t, weights=self.weights)
                result = (total, frozenset(eids))
            self.stats.count("path_calls")
        except (NoPath, SubcallFailed):
            self.stats.count("path_calls")
            result = None
        self.paths[key] = result
        return result


def assemble_candidate(
    g: Graph,
    cfg: MarkerConfiguration,
    eta_per_call=Fraction(1, 100),
    params: CycleSolverParams | None = None,
) -> Solution:
    """Cycle through the first part plus one path per anchor pair.

    The union is an edge set (overlaps collapse). Any failing subroutine
    raises SubcallFailed so the caller can skip the configuration.
    """
    cfg.validate()
    calls = _Subcalls(g, None, params, exact_fraction(eta_per_call), SolveStats())
    got = calls.cycle(cfg.partition.parts[0])
    if got is None:
        raise SubcallFailed("no cycle through the first part")
    edges = set(got[1])
    for i, (s, t) in enumerate(cfg.anchors):
        part = cfg.partition.parts[i + 1]
        got = calls.path(part, s, t)
        if got is None:
            raise SubcallFailed(f"no {s}-{t} path through part {i + 1}")
        edges |= got[1]
    out = frozenset(edges)
    return Solution(edges=out, cost=g.total_cost(out))


class _Incumbent:
    """Shared minimum register: min by (weight, lexicographic edge tuple)."""

    def __init__(self, weight: int, edges: frozenset[int]):
        self.weight = weight
        self.key = tuple(sorted(edges))
        self.edges = edges
        self.lock = threading.Lock()

    def offer(self, weight: int, edges: frozenset[int]) -> bool:
        key = tuple(sorted(edges))
        with self.lock:
            if (weight, key) < (self.weight, self.key):
                self.weight, self.key, self.edges = weight, key, edges
                return True
        return False


def _solve_core(
    g: Graph,
    terminals,
    *,
    weights: dict[int, int] | None = None,
    mode: str = "audit",
    threads: int = 1,
    params: CycleSolverParams | None = None,
    marker_universe=None,
    wide_subsets: bool = False,
    eta=Fraction(1, 100),
    stats: SolveStats | None = None,
    feasibility_checked: bool = False,
) -> tuple[int, frozenset[int]]:
    terms = sorted(set(terminals))
    k = len(terms)
    if k < 2:
        raise ValueError("the solver needs at least two terminals")
    if mode not in ("audit", "fast"):
        raise ValueError("mode must be 'audit' or 'fast'")
    if not feasibility_checked and not prefix_feasible(
        g, terms, ProblemKind.TWO_NCS, list(g.edge_ids())
    ):
        raise Infeasible("terminals do not lie in a common 2-node-connected block")

    stats = stats if stats is not None else SolveStats()
    eta = exact_fraction(eta)
    eta_per_call = eta / k
    stats.eta = eta
    stats.eta_per_call = eta_per_call
    stats.threads = threads

    calls = _Subcalls(g, weights, params, eta_per_call, stats)
    full = frozenset(g.edge_ids())
    incumbent = _Incumbent(calls._weigh(full), full)
    lower_bound = max(3, k)
    term_set = set(terms)
    universe = sorted(marker_universe) if marker_universe is not None else range(g.n)
    bound = 2 * k if wide_subsets else max(2 * k - 4, 0)
    subsets = list(subsets_up_to(universe, bound))
    stop = threading.Event()

    def feasible(edges: frozenset[int]) -> bool:
        return term_set <= subgraph_nodes(g, edges) and is_2nc(g, edges)

    def process(chunk: list[tuple[int, frozenset[int]]]):
        iterations = 0
        updates: list[tuple[int, int]] = []
        for subset_index, S in chunk:
            if stop.is_set():
                break
            ground = sorted(term_set | S)
            for partition in ordered_partitions(ground, k, 2):
                if stop.is_set():
                    break
                parts = partition.parts
                r = len(parts)
                dims: list[list[tuple[int, int]]] = []
                pool = set(parts[0])
                for i in range(1, r):
                    nodes = sorted(pool)
                    dims.append([(s, t) for s in nodes for t in nodes if s != t])
                    pool |= parts[i]
                suffix = [1] * (len(dims) + 1)
                for j in range(len(dims) - 1, -1, -1):
                    suffix[j] = suffix[j + 1] * len(dims[j])

                cyc = calls.cycle(parts[0])
                if cyc is None:
                    iterations += suffix[0]
                    continue

                def walk(idx: int, union: frozenset[int], weight: int) -> int:
                    done = 0
                    if idx == len(dims):
                        # feasibility is only ever tested on would-be updates
                        if weight <= incumbent.weight and feasible(union):
                            if incumbent.offer(weight, union):
                                updates.append((subset_index, weight))
                                if mode == "fast" and weight <= lower_bound:
                                    stop.set()
                        return 1
                    part = parts[idx + 1]
                    for s, t in dims[idx]:
                        sub = calls.path(part, s, t)
                        if sub is None:
                            done += suffix[idx + 1]
                            continue
                        added = sub[1] - union
                        nw = weight + sum(calls.w[e] for e in added)
                        if nw > incumbent.weight:
                            done += suffix[idx + 1]
                            continue
                        done += walk(idx + 1, union | sub[1], nw)
                    return done

                iterations += walk(0, cyc[1], cyc[0])
        return iterations, updates

    indexed = list(enumerate(subsets))
    if threads <= 1:
        total_iters, all_updates = process(indexed)
    else:
        chunks = [indexed[i::threads] for i in range(threads)]
        chunks = [c for c in chunks if c]
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool_exec:
            results = list(pool_exec.map(process, chunks))
        total_iters = sum(r[0] for r in results)
        all_updates = sorted(
            (u for r in results for u in r[1]), key=lambda x: x[0]
        )

    stats.iterations += total_iters
    stats.updates.extend(all_updates)

    final = incumbent.edges
    if final == full and not feasible(full):
        # the sentinel never got replaced and is itself no solution
        raise Infeasible("no feasible candidate was assembled")
    return incumbent.weight, final


def solve_2ncs_unweighted(
    g: Graph,
    terminals,
    eta=Fraction(1, 100),
    seed: int = 0,
    *,
    mode: str = "audit",
    threads: int = 1,
    params: CycleSolverParams | None = None,
    wide_subsets: bool = False,
    stats: SolveStats | None = None,
) -> Solution:
    """Minimum-size 2-node-connected subgraph containing the terminals.

    Deterministic with the built-in engine; ``eta`` only matters for
    plugin subcalls (budget eta/k each). Raises Infeasible when the
    terminals do not share a block of at least three nodes.
    """
    stats = stats if stats is not None else SolveStats()
    stats.seed = seed
    _, edges = _solve_core(
        g,
        terminals,
        mode=mode,
        threads=threads,
        params=params,
        wide_subsets=wide_subsets,
        eta=eta,
        stats=stats,
    )
    return Solution(edges=edges, cost=g.total_cost(edges))


def solve_2ncs_weighted(
    g: Graph,
    terminals,
    epsilon,
    eta=Fraction(1, 100),
    seed: int = 0,
    *,
    mode: str = "audit",
    threads: int = 1,
    params: CycleSolverParams | None = None,
    wide_subsets: bool = False,
    stats: SolveStats | None = None,
) -> Solution:
    """(1+eps)-approximate minimum-cost 2-node-connected Steiner subgraph.

    Cost-sorts and rounds through the scaling gadget, solves one
    unweighted instance on the folded view (integer weights stand in for
    subdivision chains), and maps edge ids back. Plugin engines get the
    literal subdivided graph instead, with candidate degree-3 sets still
    drawn from original nodes only (subdivision nodes have degree two and
    can never need a marker).
    """
    eps = exact_fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    eta = exact_fraction(eta)
    stats = stats if stats is not None else SolveStats()
    stats.seed = seed
    stats.epsilon = eps
    gadget = build_scaling_gadget(g, terminals, eps, eta / 2, ProblemKind.TWO_NCS)
    record_gadget(stats, gadget)
    if params is not None and params.solver_kind is SolverKind.PLUGIN:
        _, sub_edges = _solve_core(
            gadget.subdivided_graph,
            terminals,
            mode=mode,
            threads=threads,
            params=params,
            marker_universe=range(g.n),
            wide_subsets=wide_subsets,
            eta=eta / 2,
            stats=stats,
            feasibility_checked=True,
        )
        edges = gadget.map_back(sub_edges)
    else:
        _, folded_edges = _solve_core(
            gadget.folded_graph,
            terminals,
            weights=gadget.fold_weights(),
            mode=mode,
            threads=threads,
            params=params,
            wide_subsets=wide_subsets,
            eta=eta / 2,
            stats=stats,
            feasibility_checked=True,
        )
        edges = gadget.unfold(folded_edges)
    return Solution(
        edges=edges,
        cost=g.total_cost(edges),
        optimal=False,
        ratio_bound=1 + eps,
    )
