"""Classical reference optimizers: subset DP and greedy.

These provide the comparison costs for the encoded problems: dp_with_cross
is the unrestricted left-deep optimum, dp_without_cross the optimum over
adherent plans, greedy the cheap baseline the heuristic formulation is
measured against.
"""

from __future__ import annotations

import numpy as np

from .jointree import JoinTree, cost as tree_cost, leftdeep_from_order
from .querygraph import QueryGraph


class BaselineError(RuntimeError):
    pass


DP_CROSS_CAP = 22
DP_DICT_STATE_BUDGET = 2_000_000


def _subset_cards(g: QueryGraph, N: int, states: np.ndarray) -> np.ndarray:
    card = np.ones(N, dtype=np.float64)
    for i in range(g.n_relations):
        card[(states & (1 << i)) != 0] *= g.cardinality_of(i)
    for u, v, f in g.edges:
        m = (1 << u) | (1 << v)
        card[(states & m) == m] *= f
    return card


def _ascending_base(order: list) -> list:
    # the first two relations form one unordered prefix set; render them
    # smaller-id-first so backtracked orders are canonical
    if len(order) >= 2 and order[0] > order[1]:
        order[0], order[1] = order[1], order[0]
    return order


def _popcount_levels(n: int, states: np.ndarray) -> list:
    pc = np.zeros(states.shape, dtype=np.int64)
    for i in range(n):
        pc += (states >> i) & 1
    return [states[pc == k] for k in range(n + 1)]


def _dp_vectorized(g: QueryGraph, restrict_connected: bool):
    n = g.n_relations
    N = 1 << n
    states = np.arange(N, dtype=np.int64)
    card = _subset_cards(g, N, states)
    levels = _popcount_levels(n, states)
    dp = np.full(N, np.inf, dtype=np.float64)
    pred = np.full(N, -1, dtype=np.int8)
    for i in range(n):
        dp[1 << i] = 0.0
    adj = [0] * n
    for u, v, _f in g.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    for k in range(1, n):
        subs = levels[k]
        base = dp[subs]
        reachable = np.isfinite(base)
        subs = subs[reachable]
        base = base[reachable]
        if subs.size == 0:
            continue
        for i in range(n):
            bit = 1 << i
            ok = (subs & bit) == 0
            if restrict_connected:
                ok &= (subs & adj[i]) != 0
            src = subs[ok]
            if src.size == 0:
                continue
            tgt = src | bit
            cand = base[ok] + card[tgt]
            upd = cand < dp[tgt]  # strict: earlier (smaller) i wins ties
            dp[tgt[upd]] = cand[upd]
            pred[tgt[upd]] = i
    full = N - 1
    if not np.isfinite(dp[full]):
        raise BaselineError("no complete plan reachable")
    order_rev = []
    s = full
    while s & (s - 1):  # more than one bit set
        i = int(pred[s])
        order_rev.append(i)
        s ^= 1 << i
    order_rev.append(int(s).bit_length() - 1)
    order = _ascending_base(list(reversed(order_rev)))
    tree = leftdeep_from_order(order)
    # report the canonical evaluation of the chosen plan, so algorithms that
    # pick the same plan report bit-identical costs
    return tree, tree_cost(tree, g)


def _dp_nocross_dict(g: QueryGraph, budget: int):
    """Connected-subset DP over a dict; feasible when the graph is sparse
    enough that connected subsets stay countable."""
    n = g.n_relations
    cur: dict = {}
    for i in range(n):
        cur[1 << i] = (0.0, float(g.cardinality_of(i)), -1)
    preds: dict = {}
    total_states = n
    for _level in range(1, n):
        nxt: dict = {}
        for s in sorted(cur):
            cost, cards, _p = cur[s]
            for i in range(n):
                bit = 1 << i
                if s & bit:
                    continue
                sel = 1.0
                touches = False
                for m in range(n):
                    if (s >> m) & 1 and g.has_edge(min(m, i), max(m, i)):
                        sel *= g.selectivity(m, i)
                        touches = True
                if not touches:
                    continue
                newcard = cards * g.cardinality_of(i) * sel
                newcost = cost + newcard
                t = s | bit
                old = nxt.get(t)
                if old is None or newcost < old[0]:
                    nxt[t] = (newcost, newcard, i)
        total_states += len(nxt)
        if total_states > budget:
            raise BaselineError("connected-subset state budget exceeded")
        preds.update({t: entry[2] for t, entry in nxt.items()})
        cur = nxt
    full = (1 << n) - 1
    if full not in cur:
        raise BaselineError("no complete plan reachable")
    order_rev = []
    s = full
    while s & (s - 1):
        i = preds[s]
        order_rev.append(i)
        s ^= 1 << i
    order_rev.append(int(s).bit_length() - 1)
    order = _ascending_base(list(reversed(order_rev)))
    tree = leftdeep_from_order(order)
    return tree, tree_cost(tree, g)


def dp_with_cross(g: QueryGraph):
    """Optimal left-deep plan, cross products allowed. Returns (tree, cost)."""
    if g.n_relations > DP_CROSS_CAP:
        raise BaselineError(
            f"{g.n_relations} relations exceed the 2^n DP cap of {DP_CROSS_CAP}")
    return _dp_vectorized(g, restrict_connected=False)


def dp_without_cross(g: QueryGraph, budget: int = DP_DICT_STATE_BUDGET):
    """Optimal adherent left-deep plan. Returns (tree, cost)."""
    if g.n_relations <= DP_CROSS_CAP:
        return _dp_vectorized(g, restrict_connected=True)
    return _dp_nocross_dict(g, budget)


def greedy_without_cross(g: QueryGraph):
    """Cheapest first join, then always the adjacent table that keeps the
    running total smallest; ties to the smaller relation id."""
    n = g.n_relations
    best = None
    for u, v, f in g.edges:
        c = f * g.cardinality_of(u) * g.cardinality_of(v)
        key = (c, (u, v))
        if best is None or key < best:
            best = key
    card, (u, v) = best
    order = [u, v]
    members = {u, v}
    while len(order) < n:
        pick = None
        for t in range(n):
            if t in members:
                continue
            sel = 1.0
            touches = False
            for m in sorted(members):
                if g.has_edge(min(m, t), max(m, t)):
                    sel *= g.selectivity(m, t)
                    touches = True
            if not touches:
                continue
            newcard = card * g.cardinality_of(t) * sel
            key = (newcard, t)
            if pick is None or key < pick:
                pick = key
        if pick is None:
            raise BaselineError("graph is not connected")
        newcard, t = pick
        order.append(t)
        members.add(t)
        card = newcard
    tree = leftdeep_from_order(order)
    return tree, tree_cost(tree, g)
