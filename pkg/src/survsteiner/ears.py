"""Ear decompositions: plain, open, and terminal-anchored.

An ear decomposition starts from a base node, adds one closed ear (a cycle
through the base), then path or cycle ears whose endpoints lie on the body
built so far and whose internal nodes are new. A graph with at least two
nodes is 2-edge-connected exactly when such a decomposition covers every
edge, and 2-node-connected (three or more nodes) exactly when every ear
after the first is an open path.

``ear_decomposition`` computes one via chain decomposition: a depth-first
tree is walked in preorder and every back edge spawns a chain running from
its upper endpoint down the back edge and then up tree edges to the first
node already in a chain. ``terminal_ear_decomposition`` instead grows the
body terminal by terminal using two-fans found with a small unit-capacity
max-flow, so each early ear carries a terminal as an internal node.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .errors import NotTwoConnected, TerminalMissing
from .graph import Graph, _view, is_connected, is_2nc


@dataclass(frozen=True)
class Ear:
    """One ear: a walk given as nodes and the edge ids between them."""

    nodes: tuple[int, ...]
    edges: tuple[int, ...]
    closed: bool

    @property
    def is_open(self) -> bool:
        return not self.closed

    @property
    def internal_nodes(self) -> tuple[int, ...]:
        return self.nodes[1:-1]


@dataclass(frozen=True)
class EarDecomposition:
    """Ordered ears over a subgraph, starting from ``base_node``.

    ``terminal_prefix`` counts the leading ears that were added to cover
    terminals (zero for decompositions without terminals).
    """

    base_node: int
    ears: tuple[Ear, ...]
    terminal_prefix: int = 0

    def edge_ids(self) -> frozenset[int]:
        out: set[int] = set()
        for ear in self.ears:
            out.update(ear.edges)
        return frozenset(out)


def _sorted_incidence(g: Graph, eids: list[int]) -> dict[int, list[tuple[int, int]]]:
    inc: dict[int, list[tuple[int, int]]] = {}
    for eid in eids:
        e = g.edges[eid]
        inc.setdefault(e.u, []).append((eid, e.v))
        inc.setdefault(e.v, []).append((eid, e.u))
    return inc


def ear_decomposition(
    g: Graph, open_required: bool = False, edges: Iterable[int] | None = None
) -> EarDecomposition:
    """Decompose the (sub)graph into ears, raising NotTwoConnected if none exists.

    Succeeds exactly on 2-edge-connected views; with ``open_required`` it
    succeeds exactly on 2-node-connected views (at least three nodes and
    every ear after the first open).
    """
    nodes, eids = _view(g, edges)
    if not eids or len(nodes) < 2:
        raise NotTwoConnected("nothing to decompose")
    if not is_connected(g, eids if edges is not None else None):
        raise NotTwoConnected("graph is not connected")
    if open_required and len(nodes) < 3:
        raise NotTwoConnected("open decomposition needs at least 3 nodes")

    inc = _sorted_incidence(g, eids)
    root = min(nodes)
    disc: dict[int, int] = {root: 0}
    parent: dict[int, int] = {}
    parent_edge: dict[int, int] = {}
    preorder: list[int] = [root]
    down_backs: dict[int, list[tuple[int, int]]] = {}
    # frame: [node, parent edge id, next incident index]
    frames: list[list[int]] = [[root, -1, 0]]
    while frames:
        v, pe, i = frames[-1]
        if i >= len(inc[v]):
            frames.pop()
            continue
        frames[-1][2] += 1
        eid, w = inc[v][i]
        if eid == pe:
            continue
        if w not in disc:
            disc[w] = len(disc)
            parent[w] = v
            parent_edge[w] = eid
            preorder.append(w)
            frames.append([w, eid, 0])
        elif disc[w] < disc[v]:
            down_backs.setdefault(w, []).append((eid, v))

    marked: set[int] = set()
    covered: set[int] = set()
    ears: list[Ear] = []
    for u in preorder:
        for eid, d in sorted(down_backs.get(u, ())):
            marked.add(u)
            seq_nodes = [u]
            seq_edges = [eid]
            cur = d
            while cur not in marked:
                marked.add(cur)
                seq_nodes.append(cur)
                seq_edges.append(parent_edge[cur])
                cur = parent[cur]
            seq_nodes.append(cur)
            ears.append(
                Ear(tuple(seq_nodes), tuple(seq_edges), seq_nodes[0] == seq_nodes[-1])
            )
            covered.update(seq_edges)

    if covered != set(eids):
        raise NotTwoConnected("a bridge prevents any ear decomposition")
    if open_required and any(ear.closed for ear in ears[1:]):
        raise NotTwoConnected("a cut-node forces a closed ear")
    return EarDecomposition(base_node=root, ears=tuple(ears))


def check_ear_decomposition(
    g: Graph,
    decomposition: EarDecomposition,
    edges: Iterable[int] | None = None,
    open_required: bool = False,
    terminals: Iterable[int] | None = None,
) -> None:
    """Validate every structural rule of a decomposition; ValueError on breach.

    Used by tests and by certificate re-validation, so it trusts nothing:
    walk consistency, partitioning, attachment and freshness rules, the
    open/closed tags, and (when terminals are given) the terminal-prefix
    promises are all rechecked from scratch.
    """
    _, eids = _view(g, edges)
    target = set(eids)
    ears = decomposition.ears
    if not ears:
        raise ValueError("decomposition has no ears")

    seen_edges: set[int] = set()
    body: set[int] = {decomposition.base_node}
    for idx, ear in enumerate(ears):
        if len(ear.nodes) != len(ear.edges) + 1 or not ear.edges:
            raise ValueError(f"ear {idx}: node/edge sequence lengths do not match")
        for j, eid in enumerate(ear.edges):
            if eid not in target:
                raise ValueError(f"ear {idx}: edge {eid} outside the decomposed view")
            e = g.edge(eid)
            if {ear.nodes[j], ear.nodes[j + 1]} != {e.u, e.v}:
                raise ValueError(f"ear {idx}: edge {eid} does not join its stated nodes")
            if eid in seen_edges:
                raise ValueError(f"ear {idx}: edge {eid} appears twice")
            seen_edges.add(eid)
        closed = ear.nodes[0] == ear.nodes[-1]
        if closed != ear.closed:
            raise ValueError(f"ear {idx}: open/closed tag contradicts the node walk")
        if idx == 0:
            if not closed or ear.nodes[0] != decomposition.base_node:
                raise ValueError("first ear must be a cycle through the base node")
        elif open_required and closed:
            raise ValueError(f"ear {idx}: closed ear in an open decomposition")
        if ear.nodes[0] not in body or ear.nodes[-1] not in body:
            raise ValueError(f"ear {idx}: endpoint not on the body built so far")
        internal = ear.internal_nodes
        if len(set(internal)) != len(internal):
            raise ValueError(f"ear {idx}: repeated internal node")
        for v in internal:
            if v in body:
                raise ValueError(f"ear {idx}: internal node {v} already on the body")
        if ear.nodes[0] in internal or ear.nodes[-1] in internal:
            raise ValueError(f"ear {idx}: endpoint repeated as internal node")
        body.update(ear.nodes)

    if seen_edges != target:
        raise ValueError("ears do not cover the decomposed edge set")

    if terminals is not None:
        terms = set(terminals)
        prefix = decomposition.terminal_prefix
        if decomposition.base_node not in terms:
            raise ValueError("base node is not a terminal")
        if prefix > max(len(terms) - 1, 0):
            raise ValueError("terminal prefix longer than |terminals| - 1")
        covered_nodes: set[int] = {decomposition.base_node}
        for idx in range(prefix):
            if not terms & set(ears[idx].internal_nodes):
                raise ValueError(f"ear {idx}: no terminal among its internal nodes")
            covered_nodes.update(ears[idx].nodes)
        if not terms <= covered_nodes:
            raise ValueError("terminal prefix does not cover all terminals")


class _FlowNet:
    """Tiny unit-capacity max-flow network with node splitting."""

    def __init__(self) -> None:
        self.adj: dict[object, list[list]] = {}

    def add(self, a: object, b: object, cap: int, eid: int | None = None) -> None:
        # arc: [head, cap, eid, twin index, is_forward]
        fa = self.adj.setdefault(a, [])
        fb = self.adj.setdefault(b, [])
        fa.append([b, cap, eid, len(fb), True])
        fb.append([a, 0, eid, len(fa) - 1, False])

    def augment(self, src: object, dst: object) -> bool:
        prev: dict[object, tuple[object, int]] = {src: (src, -1)}
        queue = [src]
        qi = 0
        while qi < len(queue):
            x = queue[qi]
            qi += 1
            for ai, arc in enumerate(self.adj[x]):
                head, cap = arc[0], arc[1]
                if cap <= 0 or head in prev:
                    continue
                prev[head] = (x, ai)
                if head == dst:
                    cur = dst
                    while cur != src:
                        tail, idx = prev[cur]
                        arc2 = self.adj[tail][idx]
                        arc2[1] -= 1
                        self.adj[cur][arc2[3]][1] += 1
                        cur = tail
                    return True
                queue.append(head)
        return False

    def flow_on(self, arc: list) -> int:
        return self.adj[arc[0]][arc[3]][1] if arc[4] else 0

    def consume(self, arc: list) -> None:
        self.adj[arc[0]][arc[3]][1] -= 1


def _two_fan(
    g: Graph,
    eids: list[int],
    source: int,
    body: set[int],
    body_cap: int,
) -> list[tuple[list[int], list[int]]]:
    """Two node-disjoint paths from ``source`` to the body over ``eids``.

    Internal nodes get capacity one (split into in/out copies), body nodes
    only absorb flow, so the paths share nothing except the source. With a
    singleton body both paths may end at the same body node (a cycle).
    Returns two (node list, edge-id list) paths source-to-body.
    """
    net = _FlowNet()
    sink = ("sink",)
    for b in sorted(body):
        net.add(("b", b), sink, body_cap)

    def tail_of(x: int):
        return ("out", x) if x != source else ("src",)

    transit: set[int] = set()
    for eid in eids:
        e = g.edges[eid]
        for x, y in ((e.u, e.v), (e.v, e.u)):
            if x in body:
                continue
            if y == source:
                continue
            head = ("b", y) if y in body else ("in", y)
            if y not in body and y not in transit and y != source:
                transit.add(y)
                net.add(("in", y), ("out", y), 1)
            net.add(tail_of(x), head, 1, eid)

    src = ("src",)
    if src not in net.adj:
        raise NotTwoConnected(f"node {source} has no usable edges")
    pushed = 0
    while pushed < 2 and net.augment(src, sink):
        pushed += 1
    if pushed < 2:
        raise NotTwoConnected(f"no two-fan from node {source} to the body")

    paths: list[tuple[list[int], list[int]]] = []
    for arc in net.adj[src]:
        if len(paths) == 2:
            break
        if not arc[4] or net.flow_on(arc) < 1:
            continue
        nodes = [source]
        eids_path: list[int] = []
        cur = arc
        while True:
            net.consume(cur)
            eids_path.append(cur[2])
            kind, v = cur[0][0], cur[0][1]
            nodes.append(v)
            if kind == "b":
                break
            cur = next(
                (c for c in net.adj[("out", v)] if c[4] and net.flow_on(c) >= 1),
                None,
            )
            if cur is None:
                raise NotTwoConnected("flow paths could not be traced")
        paths.append((nodes, eids_path))
    return paths


def terminal_ear_decomposition(
    h: Graph, terminals: Iterable[int], edges: Iterable[int] | None = None
) -> EarDecomposition:
    """Open ear decomposition whose early ears each carry a terminal internally.

    The base node is the smallest terminal; while terminals remain
    uncovered, a two-fan from the smallest uncovered terminal to the body
    forms the next ear (the first fan closes into a cycle through the
    base). That takes at most |terminals| - 1 ears. Remaining edges are
    then appended as ordinary open ears.
    """
    nodes, eids = _view(h, edges)
    node_set = set(nodes)
    terms = sorted(set(terminals))
    if not terms:
        raise TerminalMissing("at least one terminal is required")
    for t in terms:
        if t not in node_set:
            raise TerminalMissing(f"terminal {t} is not in the graph")
    if not is_2nc(h, eids):
        raise NotTwoConnected("terminal decomposition needs a 2-node-connected graph")

    base = terms[0]
    body: set[int] = {base}
    covered: set[int] = set()
    ears: list[Ear] = []

    def add_fan_ear(source: int) -> None:
        avail = [eid for eid in eids if eid not in covered]
        p1, p2 = _two_fan(h, avail, source, body, 2 if len(body) == 1 else 1)
        seq_nodes = list(reversed(p1[0])) + p2[0][1:]
        seq_edges = list(reversed(p1[1])) + p2[1]
        ears.append(
            Ear(tuple(seq_nodes), tuple(seq_edges), seq_nodes[0] == seq_nodes[-1])
        )
        body.update(seq_nodes)
        covered.update(seq_edges)

    while True:
        uncovered = [t for t in terms if t not in body]
        if not uncovered:
            break
        add_fan_ear(uncovered[0])
    prefix = len(ears)

    if not ears:
        # lone terminal: still need the opening cycle through the base
        first_eid = min(eid for eid in eids if base in h.edges[eid].ends)
        add_fan_ear(h.edges[first_eid].other(base))
        # the fan source sits on the cycle, not in the terminal prefix

    inc = _sorted_incidence(h, list(eids))
    while len(covered) != len(eids):
        pick = None
        for eid in eids:
            if eid in covered:
                continue
            e = h.edges[eid]
            if e.u in body or e.v in body:
                pick = e
                break
        if pick is None:
            raise NotTwoConnected("uncovered edges detached from the body")
        if pick.u in body and pick.v in body:
            ears.append(Ear((pick.u, pick.v), (pick.id,), False))
            covered.add(pick.id)
            continue
        u = pick.u if pick.u in body else pick.v
        w = pick.other(u)
        # shortest escape from w back to the body avoiding u, on fresh edges
        prev: dict[int, tuple[int, int]] = {w: (-1, -1)}
        queue = [w]
        qi = 0
        hit = None
        while qi < len(queue) and hit is None:
            x = queue[qi]
            qi += 1
            for eid2, y in inc.get(x, ()):
                if eid2 in covered or eid2 == pick.id or y == u or y in prev:
                    continue
                prev[y] = (x, eid2)
                if y in body:
                    hit = y
                    break
                queue.append(y)
        if hit is None:
            raise NotTwoConnected(f"no return path from node {w} to the body")
        seq_nodes = [hit]
        seq_edges = []
        cur = hit
        while cur != w:
            px, peid = prev[cur]
            seq_edges.append(peid)
            seq_nodes.append(px)
            cur = px
        seq_nodes.append(u)
        seq_edges.append(pick.id)
        seq_nodes.reverse()
        seq_edges.reverse()
        ears.append(Ear(tuple(seq_nodes), tuple(seq_edges), False))
        body.update(seq_nodes)
        covered.update(seq_edges)

    return EarDecomposition(base_node=base, ears=tuple(ears), terminal_prefix=prefix)
