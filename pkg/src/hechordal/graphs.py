"""Plaintext simple undirected graphs.

Vertices are 0..n-1, edges are unordered pairs stored canonically as (u, v)
with u < v. Everything here is the trusted, unencrypted side of the project:
ground-truth chordality oracles, graph generators, and the on-disk format.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

EXHAUSTIVE_CYCLE_LIMIT = 12

_BUILTIN_EDGES = {
    # 5-vertex chordal example: a 4-cycle with a chord plus a pendant triangle.
    "fig1a": (5, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4)]),
    # Same graph with the chord removed; the 4-cycle survives elimination.
    "fig1b": (5, [(0, 1), (0, 2), (1, 3), (2, 3), (2, 4), (3, 4)]),
    # 7-vertex chordal example used by the worked score-vector walkthrough.
    "fig3": (7, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (1, 4), (3, 4), (3, 5), (5, 6)]),
}


class GraphFormatError(ValueError):
    """Raised when graph file text does not conform to the edge-list format."""


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph. Build via :func:`graph_from_edges`."""

    n: int
    edges: frozenset  # of (u, v) tuples with u < v

    @cached_property
    def neighbor_sets(self) -> tuple:
        sets = [set() for _ in range(self.n)]
        for u, v in self.edges:
            sets[u].add(v)
            sets[v].add(u)
        return tuple(frozenset(s) for s in sets)

    @cached_property
    def adjacency(self) -> tuple:
        """Dense 0/1 adjacency matrix as a tuple of row tuples."""
        rows = []
        for i in range(self.n):
            nbrs = self.neighbor_sets[i]
            rows.append(tuple(1 if j in nbrs else 0 for j in range(self.n)))
        return tuple(rows)

    @property
    def edge_count(self) -> int:
        return len(self.edges)


def graph_from_edges(n: int, edges) -> Graph:
    """Build a graph from an iterable of vertex pairs (either orientation).

    Duplicate edges collapse; self-loops and out-of-range endpoints are errors.
    """
    if n < 0:
        raise ValueError(f"vertex count must be non-negative, got {n}")
    canonical = set()
    for u, v in edges:
        if not (0 <= u < n) or not (0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
        if u == v:
            raise ValueError(f"self-loop ({u}, {v}) is not allowed")
        canonical.add((u, v) if u < v else (v, u))
    return Graph(n, frozenset(canonical))


def degree(g: Graph, v: int) -> int:
    _check_vertex(g, v)
    return len(g.neighbor_sets[v])


def neighbors(g: Graph, v: int) -> frozenset:
    _check_vertex(g, v)
    return g.neighbor_sets[v]


def is_simplicial(g: Graph, v: int) -> bool:
    """True iff v's neighbours are pairwise adjacent (degree 0 and 1 qualify)."""
    _check_vertex(g, v)
    nbrs = g.neighbor_sets[v]
    return all(b in g.neighbor_sets[a] for a, b in combinations(sorted(nbrs), 2))


def eliminate(g: Graph):
    """Repeatedly strip *all* currently simplicial vertices, one batch per pass.

    Returns (is_chordal, order): is_chordal is True iff the graph empties, and
    order lists removals (each batch in ascending vertex id). The verdict does
    not depend on how many simplicial vertices a pass removes.
    """
    alive = set(range(g.n))
    nbrs = [set(s) for s in g.neighbor_sets]
    order = []
    while alive:
        batch = [v for v in sorted(alive) if _clique(nbrs[v], nbrs)]
        if not batch:
            return False, order
        for v in batch:
            for u in nbrs[v]:
                nbrs[u].discard(v)
            nbrs[v] = set()
            alive.remove(v)
        order.extend(batch)
    return True, order


def _clique(vertices, nbrs) -> bool:
    return all(b in nbrs[a] for a, b in combinations(sorted(vertices), 2))


def chord_free_cycle_exists(g: Graph) -> bool:
    """Exhaustively search for an induced cycle of length >= 4.

    Only valid for small graphs (n <= 12); complements eliminate() as an
    independent oracle.
    """
    if g.n > EXHAUSTIVE_CYCLE_LIMIT:
        raise ValueError(f"exhaustive search limited to n <= {EXHAUSTIVE_CYCLE_LIMIT}, got n = {g.n}")
    for k in range(4, g.n + 1):
        for subset in combinations(range(g.n), k):
            if _induces_cycle(g, subset):
                return True
    return False


def _induces_cycle(g: Graph, subset) -> bool:
    inside = set(subset)
    local = {v: g.neighbor_sets[v] & inside for v in subset}
    if any(len(nb) != 2 for nb in local.values()):
        return False
    # Degree-2 everywhere means a disjoint union of cycles; connected => one cycle.
    seen = {subset[0]}
    frontier = [subset[0]]
    while frontier:
        v = frontier.pop()
        for u in local[v]:
            if u not in seen:
                seen.add(u)
                frontier.append(u)
    return len(seen) == len(inside)


def mcs_peo(g: Graph):
    """Maximum-cardinality search test: (is_chordal, candidate elimination order).

    The MCS visiting order is reversed and verified; it is a perfect
    elimination ordering exactly when the graph is chordal.
    """
    unnumbered = set(range(g.n))
    weight = [0] * g.n
    visit = []
    while unnumbered:
        v = max(sorted(unnumbered), key=weight.__getitem__)
        unnumbered.remove(v)
        visit.append(v)
        for u in g.neighbor_sets[v]:
            if u in unnumbered:
                weight[u] += 1
    order = visit[::-1]
    return _verify_peo(g, order), order


def _verify_peo(g: Graph, order) -> bool:
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        later = [u for u in g.neighbor_sets[v] if pos[u] > pos[v]]
        if not later:
            continue
        parent = min(later, key=pos.__getitem__)
        if any(u != parent and u not in g.neighbor_sets[parent] for u in later):
            return False
    return True


def gen_gnp(n: int, p: float, seed: int) -> Graph:
    """Seeded G(n, p): each of the n(n-1)/2 possible edges drawn independently."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must be in [0, 1], got {p}")
    rng = random.Random(seed)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return graph_from_edges(n, edges)


def gen_chordal(n: int, seed: int) -> Graph:
    """Seeded random chordal graph.

    Vertices are inserted one at a time, each attached to a clique among the
    earlier vertices (a random earlier vertex plus a random subset of the
    clique *it* attached to, which is itself a clique). The reverse insertion
    order is then a perfect elimination ordering, so the result is chordal by
    construction.
    """
    rng = random.Random(seed)
    edges = []
    attach = {}
    for v in range(n):
        if v == 0:
            attach[v] = frozenset()
            continue
        u = rng.randrange(v)
        kept = {w for w in sorted(attach[u]) if rng.random() < 0.5}
        clique = frozenset(kept | {u})
        attach[v] = clique
        edges.extend((w, v) for w in clique)
    return graph_from_edges(n, edges)


def builtin_graph(name: str) -> Graph:
    """Named graphs: fig1a, fig1b, fig3, path-K, cycle-K, complete-K."""
    if name in _BUILTIN_EDGES:
        n, edges = _BUILTIN_EDGES[name]
        return graph_from_edges(n, edges)
    kind, _, suffix = name.partition("-")
    if kind in ("path", "cycle", "complete") and suffix.isdigit():
        k = int(suffix)
        if kind == "path" and k >= 1:
            return graph_from_edges(k, [(i, i + 1) for i in range(k - 1)])
        if kind == "cycle" and k >= 3:
            return graph_from_edges(k, [(i, (i + 1) % k) for i in range(k)])
        if kind == "complete" and k >= 1:
            return graph_from_edges(k, combinations(range(k), 2))
    raise ValueError(f"unknown builtin graph {name!r}")


def parse_graph(text: str) -> Graph:
    """Parse the plain-text edge-list format (see :func:`format_graph`)."""
    lines = text.splitlines()
    if not lines:
        raise GraphFormatError("empty input, expected a vertex-count header")
    header = lines[0].strip()
    try:
        n = int(header)
    except ValueError:
        raise GraphFormatError(f"malformed header {header!r}, expected an integer") from None
    if n < 0:
        raise GraphFormatError(f"vertex count must be non-negative, got {n}")
    edges = set()
    for lineno, line in enumerate(lines[1:], start=2):
        stripped = line.strip()
        if not stripped:
            continue
        tokens = stripped.split()
        if len(tokens) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {stripped!r}")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer token in {stripped!r}") from None
        if not (0 <= u < n) or not (0 <= v < n):
            raise GraphFormatError(f"line {lineno}: endpoint out of range in {stripped!r}")
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop {stripped!r}")
        if u > v:
            raise GraphFormatError(f"line {lineno}: edges must be written with u < v, got {stripped!r}")
        if (u, v) in edges:
            raise GraphFormatError(f"line {lineno}: duplicate edge {stripped!r}")
        edges.add((u, v))
    return Graph(n, frozenset(edges))


def format_graph(g: Graph) -> str:
    """Canonical serialization: header line, then lexicographically sorted edges."""
    out = [f"{g.n}\n"]
    out.extend(f"{u} {v}\n" for u, v in sorted(g.edges))
    return "".join(out)


def _check_vertex(g: Graph, v: int) -> None:
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range 0..{g.n - 1}")
