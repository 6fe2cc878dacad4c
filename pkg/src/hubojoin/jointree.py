"""Join trees and their cost model.

Trees are binary: leaves are relation ids, inner nodes are joins. The
cardinality of a join multiplies both input cardinalities with every
selectivity between the two sides (absent predicates count as 1). The cost of
a tree is the sum of the cardinalities of all intermediate results; leaves
are free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .querygraph import QueryGraph


class JoinTreeError(ValueError):
    pass


@dataclass(frozen=True)
class Leaf:
    relation: int


@dataclass(frozen=True)
class Join:
    left: "JoinTree"
    right: "JoinTree"


JoinTree = Union[Leaf, Join]


def relations(t: JoinTree) -> frozenset[int]:
    """Set of relation ids appearing in t (duplicates collapse)."""
    if isinstance(t, Leaf):
        return frozenset((t.relation,))
    return relations(t.left) | relations(t.right)


def leaves(t: JoinTree) -> tuple[int, ...]:
    """Leaf relation ids in left-to-right order."""
    if isinstance(t, Leaf):
        return (t.relation,)
    return leaves(t.left) + leaves(t.right)


def _card_cost(t: JoinTree, g: QueryGraph) -> tuple[float, float, frozenset]:
    if isinstance(t, Leaf):
        return g.cardinality_of(t.relation), 0.0, frozenset((t.relation,))
    lc, lcost, lrel = _card_cost(t.left, g)
    rc, rcost, rrel = _card_cost(t.right, g)
    f = 1.0
    for i in sorted(lrel):
        for j in g.neighbors(i):
            if j in rrel:
                f *= g.selectivity(i, j)
    card = f * lc * rc
    return card, card + lcost + rcost, lrel | rrel


def cardinality(t: JoinTree, g: QueryGraph) -> float:
    return _card_cost(t, g)[0]


def cost(t: JoinTree, g: QueryGraph) -> float:
    """Total cost: sum of all intermediate cardinalities."""
    return _card_cost(t, g)[1]


def _log_cards(t: JoinTree, g: QueryGraph, acc: list) -> tuple[float, frozenset]:
    if isinstance(t, Leaf):
        return math.log(g.cardinality_of(t.relation)), frozenset((t.relation,))
    ll, lrel = _log_cards(t.left, g, acc)
    rl, rrel = _log_cards(t.right, g, acc)
    logf = 0.0
    for i in sorted(lrel):
        for j in g.neighbors(i):
            if j in rrel:
                logf += math.log(g.selectivity(i, j))
    logcard = logf + ll + rl
    acc.append(logcard)
    return logcard, lrel | rrel


def log_cardinality(t: JoinTree, g: QueryGraph) -> float:
    acc: list = []
    return _log_cards(t, g, acc)[0]


def cost_log(t: JoinTree, g: QueryGraph) -> float:
    """log of the total cost, computed without leaving log space.

    Stable for sizes where the plain cost would lose precision; only relative
    comparisons between trees on the same graph are meaningful.
    """
    acc: list = []
    _log_cards(t, g, acc)
    if not acc:
        raise JoinTreeError("a single leaf has no join cost")
    m = max(acc)
    return m + math.log(sum(math.exp(x - m) for x in acc))


def adheres(t: JoinTree, g: QueryGraph) -> bool:
    """True iff t is cross-product free on g and covers every relation once."""
    seen = leaves(t)
    if sorted(seen) != list(range(g.n_relations)):
        return False

    def each_join_connected(node: JoinTree) -> bool:
        if isinstance(node, Leaf):
            return True
        lrel = relations(node.left)
        rrel = relations(node.right)
        linked = any(
            j in rrel for i in lrel for j in g.neighbors(i)
        )
        return linked and each_join_connected(node.left) and each_join_connected(node.right)

    return each_join_connected(t)


def is_left_deep(t: JoinTree) -> bool:
    while isinstance(t, Join):
        if not isinstance(t.right, Leaf):
            return False
        t = t.left
    return isinstance(t, Leaf)


def leftdeep_from_order(order) -> JoinTree:
    """Fold a relation order into a left-deep tree: [a,b,c] -> Join(Join(a,b),c)."""
    order = list(order)
    if len(order) < 2:
        raise JoinTreeError("need at least 2 relation ids")
    if len(set(order)) != len(order):
        raise JoinTreeError(f"duplicate ids in order {order}")
    t: JoinTree = Join(Leaf(order[0]), Leaf(order[1]))
    for r in order[2:]:
        t = Join(t, Leaf(r))
    return t


def order_of(t: JoinTree) -> tuple[int, ...]:
    """Relation order of a left-deep tree."""
    if not is_left_deep(t):
        raise JoinTreeError("tree is not left-deep")
    return leaves(t)


def render(t: JoinTree) -> str:
    """Nested bracket text, e.g. [[0,1],2]."""
    if isinstance(t, Leaf):
        return str(t.relation)
    return f"[{render(t.left)},{render(t.right)}]"
