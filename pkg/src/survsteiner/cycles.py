"""Minimum Steiner cycles and paths on small multigraphs.

The default engine enumerates simple cycles through the lowest terminal
depth-first, pruning branches that are already no better than the
incumbent and branches from which the remaining terminals (or the start)
can no longer be reached. It is deterministic, has error probability
zero, and returns the lexicographically smallest edge set among optima.
Edge weights (positive integers, default one) let the same engine answer
subdivided-cost questions without materialising subdivision paths.

A plugin slot accepts an external cycle solver honoring the same
contract; candidates are vetted against the brute-force oracle on a small
fixed suite before registration succeeds.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import NoCycle, NoPath, SubcallFailed, TerminalMissing
from .graph import Graph, exact_fraction
from .solution import Solution


class SolverKind(Enum):
    EXHAUSTIVE = "exhaustive"
    PLUGIN = "plugin"


@dataclass(frozen=True)
class CycleSolverParams:
    """Failure budget, seed, and engine choice for cycle searches.

    The exhaustive engine ignores eta and seed (it cannot fail); both are
    threaded through for plugin engines and for report bookkeeping.
    """

    eta: Fraction = Fraction(1, 100)
    seed: int = 0
    solver_kind: SolverKind = SolverKind.EXHAUSTIVE
    plugin: str | None = None
    threads: int = 1

    def __post_init__(self) -> None:
        eta = exact_fraction(self.eta)
        object.__setattr__(self, "eta", eta)
        if not 0 < eta <= 1:
            raise ValueError("eta must be in (0, 1]")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.solver_kind is SolverKind.PLUGIN and not self.plugin:
            raise ValueError("plugin solver kind needs a plugin name")


def _check_terminals(g: Graph, terms: list[int]) -> None:
    if not terms:
        raise TerminalMissing("at least one terminal is required")
    for t in terms:
        if not 0 <= t < g.n:
            raise TerminalMissing(f"terminal {t} is not a node of the graph")


def search_min_cycle(
    g: Graph,
    terminals: Iterable[int],
    weights: dict[int, int] | None = None,
    min_nodes: int = 2,
    threads: int = 1,
) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
    """Exhaustive core: (total weight, sorted edge ids, node order).

    Enumerates every simple cycle through the smallest terminal once
    (direction canonicalised by requiring the closing edge id to exceed
    the opening edge id) and keeps the minimum by (weight, edge-id tuple).
    ``weights`` maps edge id to a positive integer, default 1. Cycles with
    fewer than ``min_nodes`` nodes are rejected. Raises NoCycle.
    """
    terms = sorted(set(terminals))
    _check_terminals(g, terms)
    w = [1] * g.m
    if weights:
        for eid, val in weights.items():
            w[eid] = val
    s = terms[0]
    adj: list[list[tuple[int, int]]] = [
        [(eid, g.edges[eid].other(v)) for eid in g.incident(v)] for v in range(g.n)
    ]

    def run(first_choices: list[tuple[int, int]]):
        best: tuple[int, tuple[int, ...], tuple[int, ...]] | None = None
        visited = bytearray(g.n)
        visited[s] = 1
        path_nodes = [s]
        path_eids: list[int] = []

        def reachable_ok(head: int) -> bool:
            # optimistic check: can we still close at s and pick up every
            # remaining terminal through unvisited nodes?
            reach = {head}
            stack = [head]
            can_close = False
            while stack:
                x = stack.pop()
                for _, y in adj[x]:
                    if y == s:
                        can_close = True
                    elif not visited[y] and y not in reach:
                        reach.add(y)
                        stack.append(y)
            if not can_close:
                return False
            return all(visited[t] or t in reach for t in terms)

        def dfs(head: int, acc: int, first_eid: int) -> None:
            nonlocal best
            for eid, y in adj[head]:
                if y == s:
                    if eid <= first_eid:
                        continue
                    if len(path_nodes) < min_nodes:
                        continue
                    if any(not visited[t] for t in terms):
                        continue
                    total = acc + w[eid]
                    edges = tuple(sorted(path_eids + [eid]))
                    if best is None or (total, edges) < (best[0], best[1]):
                        best = (total, edges, tuple(path_nodes))
                elif not visited[y]:
                    acc2 = acc + w[eid]
                    rem = sum(1 for t in terms if not visited[t] and t != y)
                    if best is not None and acc2 + rem + 1 > best[0]:
                        continue
                    visited[y] = 1
                    path_nodes.append(y)
                    path_eids.append(eid)
                    if reachable_ok(y):
                        dfs(y, acc2, first_eid)
                    path_nodes.pop()
                    path_eids.pop()
                    visited[y] = 0
            return

        for eid, x in first_choices:
            visited[x] = 1
            path_nodes.append(x)
            path_eids.append(eid)
            if reachable_ok(x):
                dfs(x, w[eid], eid)
            path_nodes.pop()
            path_eids.pop()
            visited[x] = 0
        return best

    first = list(adj[s])
    if threads <= 1 or len(first) <= 1:
        best = run(first)
    else:
        chunks = [first[i::threads] for i in range(threads) if first[i::threads]]
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            results = list(pool.map(run, chunks))
        best = None
        for res in results:
            if res is not None and (best is None or res[:2] < best[:2]):
                best = res
    if best is None:
        raise NoCycle("no simple cycle contains all the terminals")
    return best


def cycle_node_order(g: Graph, edges: Iterable[int]) -> tuple[int, ...]:
    """Node order of a simple cycle given by its edge set; ValueError if
    the edges do not form one. Starts at the smallest node, and its
    smaller-id incident edge decides the direction."""
    eids = sorted(set(edges))
    if len(eids) < 2:
        raise ValueError("a cycle needs at least two edges")
    inc: dict[int, list[int]] = {}
    for eid in eids:
        e = g.edge(eid)
        inc.setdefault(e.u, []).append(eid)
        inc.setdefault(e.v, []).append(eid)
    if any(len(v) != 2 for v in inc.values()) or len(inc) != len(eids):
        raise ValueError("edge set is not a single simple cycle")
    start = min(inc)
    order = [start]
    eid = min(inc[start])
    cur = g.edge(eid).other(start)
    used = {eid}
    while cur != start:
        order.append(cur)
        nxt = inc[cur][0] if inc[cur][0] not in used else inc[cur][1]
        if nxt in used:
            raise ValueError("edge set is not a single simple cycle")
        used.add(nxt)
        cur = g.edge(nxt).other(cur)
    if len(order) != len(eids):
        raise ValueError("edge set is not a single simple cycle")
    return tuple(order)


_PLUGINS: dict[str, Callable] = {}


def _conformance_suite() -> list[tuple[Graph, set[int], int | None]]:
    triangle = Graph.build(3, [(0, 1), (1, 2), (0, 2)])
    k4 = Graph.build(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    c5 = Graph.build(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    star = Graph.build(4, [(0, 1), (0, 2), (0, 3)])
    return [
        (triangle, {0, 1, 2}, 3),
        (k4, {0, 1, 2}, 3),
        (c5, {0, 2, 4}, 5),
        (star, {1, 2, 3}, None),
    ]


def register_cycle_solver(name: str, fn: Callable) -> None:
    """Register an external cycle solver after a conformance check.

    ``fn(g, terminals, eta, seed) -> iterable of edge ids`` must return a
    minimum Steiner cycle or raise NoCycle. It is exercised on a fixed
    small suite with seeds 0..2; any wrong answer aborts registration.
    """
    for g, terms, opt_size in _conformance_suite():
        for seed in range(3):
            try:
                out = frozenset(fn(g, set(terms), Fraction(1, 1000), seed))
            except NoCycle:
                if opt_size is None:
                    continue
                raise ValueError(f"plugin {name!r} missed an existing cycle") from None
            if opt_size is None:
                raise ValueError(f"plugin {name!r} invented a cycle in an acyclic case")
            if len(out) != opt_size:
                raise ValueError(
                    f"plugin {name!r} returned size {len(out)}, expected {opt_size}"
                )
    _PLUGINS[name] = fn


def min_steiner_cycle(
    g: Graph, terminals: Iterable[int], params: CycleSolverParams | None = None
) -> Solution:
    """Minimum-size simple cycle through all terminals.

    The exhaustive engine always returns a true optimum; a plugin engine
    is trusted up to its eta and its output is structurally re-checked.
    Raises NoCycle when no simple cycle spans the terminals.
    """
    params = params or CycleSolverParams()
    if params.solver_kind is SolverKind.PLUGIN:
        try:
            fn = _PLUGINS[params.plugin]
        except KeyError:
            raise ValueError(f"no plugin named {params.plugin!r} is registered") from None
        edges = frozenset(fn(g, set(terminals), params.eta, params.seed))
        try:
            nodes = cycle_node_order(g, edges)
        except ValueError as exc:
            raise SubcallFailed(f"plugin cycle is not a simple cycle: {exc}") from None
        if not set(terminals) <= set(nodes):
            raise SubcallFailed("plugin cycle misses a terminal")
        return Solution(
            edges=edges,
            cost=g.total_cost(edges),
            certificate={"kind": "cycle", "nodes": list(nodes)},
        )
    _, eids, node_order = search_min_cycle(g, terminals, threads=params.threads)
    edges = frozenset(eids)
    return Solution(
        edges=edges,
        cost=g.total_cost(edges),
        certificate={"kind": "cycle", "nodes": list(node_order)},
    )


def search_min_path(
    g: Graph,
    terminals: Iterable[int],
    s: int,
    t: int,
    weights: dict[int, int] | None = None,
    threads: int = 1,
) -> tuple[int, tuple[int, ...]]:
    """Weighted core of the path solver: (total weight, sorted edge ids).

    Adds an auxiliary node joined to s and t by unit edges, finds the
    minimum Steiner cycle through terminals plus {aux, s, t}, and deletes
    the auxiliary node again. Raises NoPath.
    """
    if s == t:
        raise ValueError("path endpoints must be distinct")
    _check_terminals(g, sorted(set(terminals) | {s, t}))
    aux = g.n
    g2 = g.extended(1, [(s, aux), (t, aux)])
    w2 = dict(weights) if weights else {}
    w2[g.m] = 1
    w2[g.m + 1] = 1
    try:
        total, eids, _ = search_min_cycle(
            g2, set(terminals) | {aux, s, t}, weights=w2, threads=threads
        )
    except NoCycle:
        raise NoPath(f"no simple {s}-{t} path covers the terminals") from None
    kept = tuple(eid for eid in eids if eid < g.m)
    return total - 2, kept


def path_node_order(g: Graph, edges: Iterable[int], s: int, t: int) -> tuple[int, ...]:
    """Node order of a simple s,t-path given by its edge set."""
    eids = sorted(set(edges))
    inc: dict[int, list[int]] = {}
    for eid in eids:
        e = g.edge(eid)
        inc.setdefault(e.u, []).append(eid)
        inc.setdefault(e.v, []).append(eid)
    if s not in inc or len(inc[s]) != 1:
        raise ValueError("path does not start cleanly at s")
    order = [s]
    cur, used = s, set()
    while cur != t or len(used) < len(eids):
        step = [eid for eid in inc.get(cur, ()) if eid not in used]
        if len(step) != 1:
            raise ValueError("edge set is not a simple s,t-path")
        used.add(step[0])
        cur = g.edge(step[0]).other(cur)
        order.append(cur)
    if len(used) != len(eids):
        raise ValueError("edge set is not a simple s,t-path")
    return tuple(order)


def min_steiner_path(
    g: Graph,
    terminals: Iterable[int],
    s: int,
    t: int,
    params: CycleSolverParams | None = None,
) -> Solution:
    """Minimum-size simple s,t-path through all terminals; raises NoPath."""
    params = params or CycleSolverParams()
    if params.solver_kind is SolverKind.PLUGIN:
        aux = g.n
        g2 = g.extended(1, [(s, aux), (t, aux)])
        try:
            sol = min_steiner_cycle(g2, set(terminals) | {aux, s, t}, params)
        except NoCycle:
            raise NoPath(f"no simple {s}-{t} path covers the terminals") from None
        kept = frozenset(eid for eid in sol.edges if eid < g.m)
        try:
            nodes = path_node_order(g, kept, s, t)
        except ValueError as exc:
            raise SubcallFailed(f"plugin path is not a simple path: {exc}") from None
        return Solution(
            edges=kept,
            cost=g.total_cost(kept),
            certificate={"kind": "path", "nodes": list(nodes)},
        )
    _, eids = search_min_path(g, terminals, s, t, threads=params.threads)
    edges = frozenset(eids)
    return Solution(
        edges=edges,
        cost=g.total_cost(edges),
        certificate={"kind": "path", "nodes": list(path_node_order(g, edges, s, t))},
    )
