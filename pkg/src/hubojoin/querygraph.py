"""Query graph model: relations with cardinalities joined by selectivity edges.

A query graph is the input to every formulation and baseline in this package.
Relations are numbered 0..n-1, edges are canonical (u < v) pairs carrying a
selectivity in (0, 1]. Graphs must be connected.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum

# Smallest selectivity the samplers will produce. Zero is excluded because a
# zero selectivity makes every downstream cardinality collapse to zero.
MIN_SELECTIVITY = 2.0 ** -53


class Shape(str, Enum):
    CHAIN = "chain"
    STAR = "star"
    CYCLE = "cycle"
    TREE = "tree"
    CLIQUE = "clique"
    CUSTOM = "custom"


class GraphError(ValueError):
    """Raised for malformed graphs, documents, or generator arguments."""


@dataclass(frozen=True)
class QueryGraph:
    """Immutable query graph.

    cardinalities[i] is the row count of relation i; edges hold
    (u, v, selectivity) with u < v, sorted by (u, v), no duplicates.
    """

    shape: Shape
    cardinalities: tuple[float, ...]
    edges: tuple[tuple[int, int, float], ...]
    _sel: dict = field(default=None, repr=False, compare=False)
    _nbrs: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.cardinalities)
        if n < 2:
            raise GraphError("a query graph needs at least 2 relations")
        for c in self.cardinalities:
            if not (c > 0):
                raise GraphError(f"cardinality must be positive, got {c}")
        seen = set()
        sel = {}
        nbrs = {i: [] for i in range(n)}
        for u, v, f in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) references unknown relation id")
            if u >= v:
                raise GraphError(f"edge ({u},{v}) must satisfy u < v")
            if (u, v) in seen:
                raise GraphError(f"duplicate edge ({u},{v})")
            if not (0 < f <= 1):
                raise GraphError(f"selectivity of ({u},{v}) must be in (0,1], got {f}")
            seen.add((u, v))
            sel[(u, v)] = f
            nbrs[u].append(v)
            nbrs[v].append(u)
        if list(self.edges) != sorted(self.edges, key=lambda e: (e[0], e[1])):
            raise GraphError("edges must be sorted by (u, v)")
        if not _connected(n, nbrs):
            raise GraphError("query graph must be connected")
        object.__setattr__(self, "_sel", sel)
        object.__setattr__(self, "_nbrs", {i: tuple(sorted(js)) for i, js in nbrs.items()})

    @property
    def n_relations(self) -> int:
        return len(self.cardinalities)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def cardinality_of(self, i: int) -> float:
        if not (0 <= i < self.n_relations):
            raise GraphError(f"unknown relation id {i}")
        return self.cardinalities[i]

    def has_edge(self, i: int, j: int) -> bool:
        if i > j:
            i, j = j, i
        return (i, j) in self._sel

    def selectivity(self, i: int, j: int) -> float:
        """Selectivity of the predicate between i and j; 1.0 if no edge."""
        for k in (i, j):
            if not (0 <= k < self.n_relations):
                raise GraphError(f"unknown relation id {k}")
        if i == j:
            raise GraphError("selectivity of a relation with itself is undefined")
        if i > j:
            i, j = j, i
        return self._sel.get((i, j), 1.0)

    def neighbors(self, i: int) -> tuple[int, ...]:
        if not (0 <= i < self.n_relations):
            raise GraphError(f"unknown relation id {i}")
        return self._nbrs[i]

    def edge_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((u, v) for u, v, _ in self.edges)

    def is_complete(self) -> bool:
        n = self.n_relations
        return self.n_edges == n * (n - 1) // 2

    def is_acyclic(self) -> bool:
        # connected is an invariant, so edge count pins the cycle space
        return self.n_edges == self.n_relations - 1


def _connected(n: int, nbrs: dict) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in nbrs[i]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == n


def _prufer_tree(n: int, rng: random.Random) -> list[tuple[int, int]]:
    """Decode a uniformly random Pruefer sequence into tree edges."""
    if n == 2:
        return [(0, 1)]
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for s in seq:
        degree[s] += 1
    edges = []
    # classic decoding: repeatedly attach the smallest leaf to the next code entry
    import heapq

    leaves = [i for i in range(n) if degree[i] == 1]
    heapq.heapify(leaves)
    for s in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, s), max(leaf, s)))
        degree[s] -= 1
        if degree[s] == 1:
            heapq.heappush(leaves, s)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((min(u, v), max(u, v)))
    return edges


def generate_shape(shape: Shape | str, n: int, seed: int = 0) -> QueryGraph:
    """Build a topology of the given shape with placeholder statistics.

    All cardinalities are 1.0 and all selectivities 1.0; use
    sample_statistics to draw real ones. The seed only matters for trees.
    """
    shape = Shape(shape)
    if shape is Shape.CUSTOM:
        raise GraphError("custom graphs cannot be generated; construct one directly")
    if n < 2:
        raise GraphError(f"invalid n={n}: need at least 2 relations")
    if shape is Shape.CYCLE and n < 3:
        raise GraphError(f"invalid n={n}: a cycle needs at least 3 relations")

    if shape is Shape.CHAIN:
        pairs = [(i, i + 1) for i in range(n - 1)]
    elif shape is Shape.STAR:
        pairs = [(0, i) for i in range(1, n)]
    elif shape is Shape.CYCLE:
        pairs = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    elif shape is Shape.CLIQUE:
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    elif shape is Shape.TREE:
        pairs = _prufer_tree(n, random.Random(seed))
    else:  # pragma: no cover
        raise GraphError(f"unhandled shape {shape}")

    pairs.sort()
    return QueryGraph(
        shape=shape,
        cardinalities=(1.0,) * n,
        edges=tuple((u, v, 1.0) for u, v in pairs),
    )


def sample_statistics(
    g: QueryGraph, card_lo: float, card_hi: float, seed: int
) -> QueryGraph:
    """Return a copy of g with uniformly sampled statistics.

    Cardinalities are uniform in [card_lo, card_hi]; selectivities uniform in
    (0, 1], realized as [MIN_SELECTIVITY, 1]. Pure function of (g, bounds,
    seed): relations then edges are visited in canonical order.
    """
    if not (0 < card_lo <= card_hi):
        raise GraphError(f"invalid cardinality range [{card_lo}, {card_hi}]")
    rng = random.Random(seed)
    cards = tuple(rng.uniform(card_lo, card_hi) for _ in range(g.n_relations))
    edges = tuple(
        (u, v, rng.uniform(MIN_SELECTIVITY, 1.0)) for u, v, _ in g.edges
    )
    return QueryGraph(shape=g.shape, cardinalities=cards, edges=edges)


def save_json(g: QueryGraph) -> bytes:
    doc = {
        "shape": g.shape.value,
        "relations": [
            {"id": i, "cardinality": c} for i, c in enumerate(g.cardinalities)
        ],
        "edges": [
            {"u": u, "v": v, "selectivity": f} for u, v, f in g.edges
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=1).encode("utf-8")


def load_json(data: bytes | str) -> QueryGraph:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise GraphError(f"malformed document: {e}") from None
    if not isinstance(doc, dict):
        raise GraphError("malformed document: top level must be an object")
    try:
        shape = Shape(doc["shape"])
        relations = doc["relations"]
        raw_edges = doc["edges"]
    except (KeyError, ValueError, TypeError) as e:
        raise GraphError(f"malformed document: {e}") from None
    if not isinstance(relations, list) or not isinstance(raw_edges, list):
        raise GraphError("malformed document: relations and edges must be arrays")

    ids = []
    cards = {}
    for rel in relations:
        try:
            i, c = int(rel["id"]), float(rel["cardinality"])
        except (KeyError, TypeError, ValueError) as e:
            raise GraphError(f"malformed relation entry: {e}") from None
        if i in cards:
            raise GraphError(f"duplicate relation id {i}")
        ids.append(i)
        cards[i] = c
    n = len(ids)
    if sorted(ids) != list(range(n)):
        raise GraphError("relation ids must be exactly 0..n-1")

    edges = []
    for e in raw_edges:
        try:
            u, v, f = int(e["u"]), int(e["v"]), float(e["selectivity"])
        except (KeyError, TypeError, ValueError) as err:
            raise GraphError(f"malformed edge entry: {err}") from None
        if u > v:
            u, v = v, u
        edges.append((u, v, f))
    edges.sort(key=lambda t: (t[0], t[1]))
    return QueryGraph(
        shape=shape,
        cardinalities=tuple(cards[i] for i in range(n)),
        edges=tuple(edges),
    )
