"""Cost scaling and edge subdivision: weighted problems on unit engines.

The recipe: sort edges by cost, find the shortest prefix that still
contains a feasible solution, call its top cost beta, drop edges costing
more than n*beta, round every surviving cost up to a multiple of
mu = eps*beta/n (zero-cost edges round to mu), and replace each edge by a
path of cost/mu unit edges. A minimum-size solution on the subdivided
graph maps back to a (1+eps)-approximate solution of the weighted
problem, because any solution loses at most n*mu = eps*beta <= eps*OPT to
rounding.

Solvers here never walk the subdivided graph directly: subdivision nodes
have degree two, so a simple cycle or path uses each subdivision chain
all or nothing, and searching the original topology with integer edge
weights equal to the chain lengths is equivalent and far smaller. The
subdivided graph is still materialised for size accounting and for
external plugin solvers, which receive it literally.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

from .cycles import (
    CycleSolverParams,
    SolverKind,
    cycle_node_order,
    min_steiner_cycle,
    search_min_cycle,
)
from .errors import Infeasible, NoCycle
from .graph import Graph, blocks_and_cuts, connected_components, exact_fraction
from .solution import ProblemKind, Solution, SolveStats


@dataclass(frozen=True)
class ScalingGadget:
    """Everything produced by one threshold-and-round pass.

    ``folded_graph`` keeps only surviving edges under fresh dense ids;
    ``fold_origin[new_id]`` recovers the original id and ``counts`` gives
    each original edge's subdivision length (the weight to use on the
    folded graph). ``subdivided_graph`` is the literal unit-cost
    expansion with ``edge_origin_map`` per unit edge.
    """

    beta: Fraction
    mu: Fraction
    threshold_index: int
    rounded_costs: dict[int, Fraction]
    counts: dict[int, int]
    surviving: tuple[int, ...]
    folded_graph: Graph
    fold_origin: tuple[int, ...]
    subdivided_graph: Graph
    edge_origin_map: tuple[int, ...]

    def fold_weights(self) -> dict[int, int]:
        return {new: self.counts[orig] for new, orig in enumerate(self.fold_origin)}

    def unfold(self, folded_edges: Iterable[int]) -> frozenset[int]:
        return frozenset(self.fold_origin[eid] for eid in folded_edges)

    def map_back(self, subdivided_edges: Iterable[int]) -> frozenset[int]:
        return frozenset(self.edge_origin_map[eid] for eid in subdivided_edges)


def _cycle_exists(g: Graph, terminals: set[int], eids: list[int]) -> bool:
    if not eids:
        return False
    sub = _restrict(g, eids)[0]
    try:
        search_min_cycle(sub, terminals)
        return True
    except NoCycle:
        return False


def _twonc_exists(g: Graph, terminals: set[int], eids: list[int]) -> bool:
    blocks, _, _ = blocks_and_cuts(g, eids)
    return any(len(b.nodes) >= 3 and terminals <= b.nodes for b in blocks)


def _fst_exists(g: Graph, terminals: set[int], eids: list[int], all_unsafe: bool) -> bool:
    # peel unsafe bridges to a fixpoint; any surviving component is
    # protectable, so feasibility is just terminal co-membership there
    current = list(eids)
    while True:
        _, _, bridges = blocks_and_cuts(g, current)
        doomed = [
            eid for eid in bridges if all_unsafe or not g.edge(eid).safe
        ]
        if not doomed:
            break
        gone = set(doomed)
        current = [eid for eid in current if eid not in gone]
    comps = connected_components(g, current)
    return any(terminals <= comp for comp in comps)


def prefix_feasible(
    g: Graph, terminals: Iterable[int], kind: ProblemKind, eids: list[int]
) -> bool:
    """Does the edge subset contain some feasible solution for the kind?"""
    terms = set(terminals)
    if kind is ProblemKind.CYCLE:
        return _cycle_exists(g, terms, eids)
    if kind is ProblemKind.TWO_NCS:
        return _twonc_exists(g, terms, eids)
    if kind is ProblemKind.TWO_ECS:
        return _fst_exists(g, terms, eids, all_unsafe=True)
    if kind is ProblemKind.KFST:
        return _fst_exists(g, terms, eids, all_unsafe=False)
    raise ValueError(f"unknown kind {kind!r}")


def _restrict(g: Graph, eids: list[int]) -> tuple[Graph, tuple[int, ...]]:
    """Same nodes, only the given edges, re-indexed densely."""
    specs = []
    origin = []
    for eid in sorted(eids):
        e = g.edges[eid]
        specs.append((e.u, e.v, e.cost, e.safe))
        origin.append(eid)
    return Graph.build(g.n, specs), tuple(origin)


def build_scaling_gadget(
    g: Graph,
    terminals: Iterable[int],
    epsilon,
    eta_budget=Fraction(1, 100),
    kind: ProblemKind = ProblemKind.CYCLE,
) -> ScalingGadget:
    """Threshold scan, nb filter, rounding, and subdivision in one go.

    Scans prefixes of the cost-sorted edge list until one contains a
    feasible solution (raising Infeasible if even the full graph does
    not), takes beta there, and produces the folded and subdivided views.
    A zero beta short-circuits the arithmetic: all surviving edges are
    zero-cost and count as single unit edges. ``eta_budget`` is carried
    for plugin engines; the built-in existence checks are deterministic.
    """
    eps = exact_fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    del eta_budget  # deterministic checks; kept in the signature for plugins
    terms = set(terminals)
    order = sorted(g.edge_ids(), key=lambda eid: (g.edges[eid].cost, eid))

    threshold = None
    for j in range(1, len(order) + 1):
        if prefix_feasible(g, terms, kind, order[:j]):
            threshold = j
            break
    if threshold is None:
        raise Infeasible(f"no feasible {kind.value} solution exists in the graph")

    beta = g.edges[order[threshold - 1]].cost
    n = g.n
    limit = n * beta
    surviving = tuple(sorted(eid for eid in g.edge_ids() if g.edges[eid].cost <= limit))
    mu = eps * beta / n if beta > 0 else Fraction(0)

    counts: dict[int, int] = {}
    rounded: dict[int, Fraction] = {}
    for eid in surviving:
        c = g.edges[eid].cost
        t = max(1, math.ceil(c / mu)) if mu > 0 else 1
        counts[eid] = t
        rounded[eid] = mu * t

    folded, fold_origin = _restrict(g, list(surviving))

    sub_specs: list[tuple] = []
    sub_origin: list[int] = []
    next_node = g.n
    extra_nodes = 0
    for eid in surviving:
        e = g.edges[eid]
        t = counts[eid]
        chain = [e.u] + [next_node + i for i in range(t - 1)] + [e.v]
        next_node += t - 1
        extra_nodes += t - 1
        for a, b in zip(chain, chain[1:]):
            sub_specs.append((a, b, Fraction(1), e.safe))
            sub_origin.append(eid)
    subdivided = Graph.build(g.n + extra_nodes, sub_specs)

    return ScalingGadget(
        beta=beta,
        mu=mu,
        threshold_index=threshold,
        rounded_costs=rounded,
        counts=counts,
        surviving=surviving,
        folded_graph=folded,
        fold_origin=fold_origin,
        subdivided_graph=subdivided,
        edge_origin_map=tuple(sub_origin),
    )


def record_gadget(stats: SolveStats | None, gadget: ScalingGadget) -> None:
    if stats is None:
        return
    stats.threshold_index = gadget.threshold_index
    stats.beta = gadget.beta
    stats.mu = gadget.mu
    stats.subdivided_nodes = gadget.subdivided_graph.n


def weighted_steiner_cycle(
    g: Graph,
    terminals: Iterable[int],
    epsilon,
    eta=Fraction(1, 100),
    seed: int = 0,
    params: CycleSolverParams | None = None,
    stats: SolveStats | None = None,
) -> Solution:
    """(1+eps)-approximate minimum-cost Steiner cycle.

    Builds the scaling gadget with half the failure budget, solves one
    unweighted instance with the other half, and maps unit edges back.
    With the exhaustive engine both halves are deterministic.
    """
    eps = exact_fraction(epsilon)
    eta = exact_fraction(eta)
    gadget = build_scaling_gadget(g, terminals, eps, eta / 2, ProblemKind.CYCLE)
    record_gadget(stats, gadget)
    if params is not None and params.solver_kind is SolverKind.PLUGIN:
        inner = CycleSolverParams(
            eta=eta / 2,
            seed=seed,
            solver_kind=SolverKind.PLUGIN,
            plugin=params.plugin,
            threads=params.threads,
        )
        sub_sol = min_steiner_cycle(gadget.subdivided_graph, terminals, inner)
        edges = gadget.map_back(sub_sol.edges)
    else:
        threads = params.threads if params is not None else 1
        _, folded_eids, _ = search_min_cycle(
            gadget.folded_graph,
            terminals,
            weights=gadget.fold_weights(),
            threads=threads,
        )
        edges = gadget.unfold(folded_eids)
    if stats is not None:
        stats.epsilon = eps
        stats.eta = eta
        stats.seed = seed
    return Solution(
        edges=edges,
        cost=g.total_cost(edges),
        optimal=False,
        ratio_bound=1 + eps,
        certificate={"kind": "cycle", "nodes": list(cycle_node_order(g, edges))},
    )
