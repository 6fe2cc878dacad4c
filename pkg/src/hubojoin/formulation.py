"""Join-order HUBO formulations.

Builds the cost polynomial over join variables x_{u,v}^r by extending
connected table sets rank by rank, attaches validity constraints in either
the cost-dependent or the cost-independent style, and assembles the
penalty-scaled problem. Also hosts encoding of left-deep orders into
assignments and decoding of assignments back into join trees.

Validity constraints are kept structured: quadratic-or-higher penalty terms
live in a plain polynomial, while every (c - sum of products)^2 block is a
SquaredGroup that is only expanded to a flat polynomial on demand. The
squared blocks can have tens of thousands of members (one per full plan),
so the expanded form is quadratic in that count and not built eagerly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .jointree import JoinTree, adheres, leftdeep_from_order
from .pbpoly import (
    CountSlack,
    JoinVar,
    Polynomial,
    TermKey,
    VariableId,
    expand_squared_linear,
    term_key,
)
from .querygraph import QueryGraph, Shape


class FormulationError(ValueError):
    pass


class Method(str, Enum):
    PRECISE1 = "precise1"
    PRECISE2 = "precise2"
    HEURISTIC = "heuristic"


class Semantics(str, Enum):
    """How an assignment represents a plan.

    ONE_PER_RANK: exactly one join variable is active per rank.
    CUMULATIVE: a join activated at rank r stays active at every later rank.
    """

    ONE_PER_RANK = "one-per-rank"
    CUMULATIVE = "cumulative"


# ---------------------------------------------------------------------------
# cost construction


@dataclass(frozen=True)
class CostHubo:
    """Cost polynomial plus the table-set dictionary built alongside it.

    table_sets maps each reached relation set to the list of term keys whose
    join-variable chain spans exactly that set.
    """

    poly: Polynomial
    table_sets: dict
    graph: QueryGraph

    def full_plan_terms(self) -> tuple:
        full = frozenset(range(self.graph.n_relations))
        return tuple(self.table_sets.get(full, ()))


def _set_order(ts: frozenset) -> tuple:
    return tuple(sorted(ts))


def _prune_frontier(frontier: dict, cards: dict, keep: int) -> dict:
    if len(frontier) <= keep:
        return frontier
    ranked = sorted(frontier, key=lambda ts: (cards[ts], _set_order(ts)))
    return {ts: frontier[ts] for ts in ranked[:keep]}


def _prune_grown(grown: dict, cards: dict, keep: int, children: dict) -> dict:
    """Select the table sets to extend at the next rank.

    Each surviving set's cheapest extension is retained first, so the chain
    of locally cheapest joins is never cut; remaining slots are filled with
    the globally cheapest other extensions. Ties break on the
    lexicographically smaller table set.
    """
    if len(grown) <= keep:
        return grown
    kept = set()
    for kids in children.values():
        kept.add(min(kids, key=lambda ts: (cards[ts], _set_order(ts))))
    if len(kept) < keep:
        rest = sorted(
            (ts for ts in grown if ts not in kept),
            key=lambda ts: (cards[ts], _set_order(ts)),
        )
        kept.update(rest[: keep - len(kept)])
    return {ts: grown[ts] for ts in sorted(kept, key=_set_order)}


def _build_cost(g: QueryGraph, keep: int | None) -> CostHubo:
    n = g.n_relations
    acc: dict = {}
    table_sets: dict = {}
    cards: dict = {}
    frontier: dict = {}
    for u, v, f in g.edges:
        ts = frozenset((u, v))
        card = f * g.cardinality_of(u) * g.cardinality_of(v)
        key = (JoinVar(u, v, 0),)
        cards[ts] = card
        acc[key] = card
        table_sets[ts] = [key]
        frontier[ts] = [key]
    if keep is not None:
        frontier = _prune_frontier(frontier, cards, keep)
    for r in range(1, n - 1):
        grown: dict = {}
        children: dict = {}
        for ts in sorted(frontier, key=_set_order):
            chains = frontier[ts]
            base_card = cards[ts]
            kids = children.setdefault(ts, set())
            for u, v, _f in g.edges:
                u_in = u in ts
                if u_in == (v in ts):
                    continue
                new_table = v if u_in else u
                nts = ts | frozenset((new_table,))
                card = cards.get(nts)
                if card is None:
                    # cardinality of the grown set: previous cardinality
                    # times the new table, times every selectivity between
                    # the new table and the old set (missing edges are 1)
                    card = base_card * g.cardinality_of(new_table)
                    for t in _set_order(ts):
                        card *= g.selectivity(t, new_table)
                    cards[nts] = card
                var = JoinVar(u, v, r)
                sink = table_sets.setdefault(nts, [])
                gsink = grown.setdefault(nts, [])
                kids.add(nts)
                for chain in chains:
                    nk = term_key(chain + (var,))
                    acc[nk] = acc.get(nk, 0.0) + card
                    sink.append(nk)
                    gsink.append(nk)
        frontier = grown if keep is None else _prune_grown(grown, cards, keep, children)
    return CostHubo(poly=Polynomial.from_accumulator(acc), table_sets=table_sets, graph=g)


def build_precise_cost(g: QueryGraph) -> CostHubo:
    """Every connected table set contributes terms; one term per join chain."""
    return _build_cost(g, None)


def build_heuristic_cost(g: QueryGraph, n: int) -> CostHubo:
    """Like build_precise_cost, but only n table sets are extended per rank.

    The first n smallest-cardinality pairs survive rank 0. At later ranks
    the survivors are each surviving set's cheapest extension plus the
    globally cheapest remaining extensions, n in total (see _prune_grown).
    With n = 1 this degenerates to exactly the greedy join chain. All terms
    created along the way stay in the polynomial.
    """
    if n < 1:
        raise FormulationError("frontier width n must be at least 1")
    return _build_cost(g, n)


# ---------------------------------------------------------------------------
# validity constraints


@dataclass(frozen=True)
class SquaredGroup:
    """(constant + sum of coeff * product)^2, kept unexpanded.

    members are (term key, coefficient) pairs; a member contributes its
    coefficient when all variables of its key are 1.
    """

    constant: float
    members: tuple

    def inner_value(self, x: Mapping) -> float:
        total = self.constant
        for key, coeff in self.members:
            for v in key:
                if not x[v]:
                    break
            else:
                total += coeff
        return total

    def value(self, x: Mapping) -> float:
        inner = self.inner_value(x)
        return inner * inner

    def expand(self) -> Polynomial:
        return expand_squared_linear(self.constant, self.members)

    def variables(self) -> frozenset:
        out: set = set()
        for key, _coeff in self.members:
            out.update(key)
        return frozenset(out)


@dataclass(frozen=True)
class ValidityParts:
    """Validity objective: plain penalty terms plus squared groups."""

    plain: Polynomial
    groups: tuple

    def value(self, x: Mapping) -> float:
        total = self.plain.evaluate(x)
        for grp in self.groups:
            total += grp.value(x)
        return total

    def materialize(self) -> Polynomial:
        poly = self.plain
        for grp in self.groups:
            poly = poly + grp.expand()
        return poly

    def variables(self) -> frozenset:
        out = set(self.plain.variables())
        for grp in self.groups:
            out.update(grp.variables())
        return frozenset(out)


def _one_join_per_rank_groups(g: QueryGraph) -> list:
    groups = []
    for r in range(g.n_relations - 1):
        members = tuple(((JoinVar(u, v, r),), -1.0) for u, v, _f in g.edges)
        groups.append(SquaredGroup(1.0, members))
    return groups


def build_validity_dependent(cost: CostHubo) -> ValidityParts:
    """One-hot over full-plan terms plus one join variable per rank."""
    g = cost.graph
    plans = cost.full_plan_terms()
    if not plans:
        raise FormulationError("cost polynomial has no full-plan terms")
    groups = [SquaredGroup(1.0, tuple((h, -1.0) for h in plans))]
    groups.extend(_one_join_per_rank_groups(g))
    return ValidityParts(plain=Polynomial(), groups=tuple(groups))


def _constraint_style(g: QueryGraph) -> str:
    if g.shape == Shape.CLIQUE:
        return "clique"
    if g.shape in (Shape.CHAIN, Shape.CYCLE):
        return "path"
    if g.shape == Shape.STAR:
        return "star"
    if g.shape == Shape.TREE:
        return "tree"
    # custom topology: pick the structurally matching family
    if g.is_complete():
        return "clique"
    if g.is_acyclic():
        return "tree"
    return "path"


def _clique_validity(g: QueryGraph) -> ValidityParts:
    n = g.n_relations
    groups = _one_join_per_rank_groups(g)
    edges = [(u, v) for u, v, _f in g.edges]
    acc: dict = {}
    # consecutive ranks must pick joins sharing exactly one table
    for r in range(n - 2):
        for u, v in edges:
            for a, b in edges:
                if len({u, v} & {a, b}) != 1:
                    key = term_key((JoinVar(u, v, r), JoinVar(a, b, r + 1)))
                    acc[key] = acc.get(key, 0.0) + 1.0
    # every table appears in at least one chosen join; the slack variables
    # absorb legal extra appearances (k = 1..n-2 covers every valid count)
    for i in range(n):
        members = [((CountSlack(i, k),), float(k)) for k in range(1, n - 1)]
        for r in range(n - 1):
            for u, v in edges:
                if i == u or i == v:
                    members.append(((JoinVar(u, v, r),), -1.0))
        groups.append(SquaredGroup(1.0, tuple(members)))
    return ValidityParts(plain=Polynomial.from_accumulator(acc), groups=tuple(groups))


def _cumulative_base(g: QueryGraph):
    """Rank r holds exactly r+1 active joins, and actives carry forward."""
    n = g.n_relations
    groups = []
    for r in range(n - 1):
        members = tuple(((JoinVar(u, v, r),), -1.0) for u, v, _f in g.edges)
        groups.append(SquaredGroup(float(r + 1), members))
    acc: dict = {}
    for u, v, _f in g.edges:
        for r in range(1, n - 1):
            prev = JoinVar(u, v, r - 1)
            cur = JoinVar(u, v, r)
            acc[(prev,)] = acc.get((prev,), 0.0) + 1.0
            key = term_key((prev, cur))
            acc[key] = acc.get(key, 0.0) - 1.0
    return groups, acc


def _sharing_pairs(g: QueryGraph) -> list:
    edges = [(u, v) for u, v, _f in g.edges]
    pairs = []
    for idx, e in enumerate(edges):
        for e2 in edges[idx + 1:]:
            if len(set(e) & set(e2)) == 1:
                pairs.append((e, e2))
    return pairs


def _pair_deficit_groups(g: QueryGraph, target) -> list:
    """Per rank r >= 1: (target(r) - #active same-rank pairs sharing a table)^2."""
    pairs = _sharing_pairs(g)
    groups = []
    for r in range(1, g.n_relations - 1):
        members = tuple(
            (term_key((JoinVar(u, v, r), JoinVar(a, b, r))), -1.0)
            for (u, v), (a, b) in pairs
        )
        groups.append(SquaredGroup(float(target(r)), members))
    return groups


def _tree_connect_terms(g: QueryGraph) -> dict:
    """Penalize a join that becomes active at rank r while no adjacent join
    (and not itself) was active at rank r-1. Expanded product form, no
    auxiliary variables."""
    n = g.n_relations
    edges = [(u, v) for u, v, _f in g.edges]
    acc: dict = {}
    for u, v in edges:
        nbrs = [e for e in edges if e != (u, v) and len({u, v} & set(e)) == 1]
        for r in range(1, n - 1):
            head = JoinVar(u, v, r)
            blockers = [JoinVar(u, v, r - 1)]
            blockers.extend(JoinVar(a, b, r - 1) for a, b in nbrs)
            for size in range(len(blockers) + 1):
                sign = -1.0 if size % 2 else 1.0
                for combo in itertools.combinations(blockers, size):
                    key = term_key((head,) + combo)
                    acc[key] = acc.get(key, 0.0) + sign
    return acc


def build_validity_independent(g: QueryGraph):
    """Shape-specific constraints; returns (ValidityParts, Semantics)."""
    style = _constraint_style(g)
    if style == "clique":
        return _clique_validity(g), Semantics.ONE_PER_RANK
    groups, acc = _cumulative_base(g)
    if style == "path":
        groups.extend(_pair_deficit_groups(g, lambda r: r))
    elif style == "star":
        # every pair of star edges shares the center, so a valid rank-r
        # prefix holds C(r+1, 2) sharing pairs
        groups.extend(_pair_deficit_groups(g, lambda r: r * (r + 1) // 2))
    else:
        for key, coeff in _tree_connect_terms(g).items():
            acc[key] = acc.get(key, 0.0) + coeff
    return ValidityParts(Polynomial.from_accumulator(acc), tuple(groups)), Semantics.CUMULATIVE


# ---------------------------------------------------------------------------
# assembled problem


@dataclass
class Problem:
    method: Method
    semantics: Semantics
    graph: QueryGraph
    cost: Polynomial  # normalized: coefficients in (0, 1]
    cost_scale: float
    validity: ValidityParts
    penalty_C: float
    plan_terms: tuple  # term keys of the expressible full plans
    heuristic_n: int | None = None
    _full: Polynomial | None = field(default=None, repr=False, compare=False)
    _vars: tuple | None = field(default=None, repr=False, compare=False)

    def variables(self) -> tuple:
        if self._vars is None:
            vs = set(self.cost.variables())
            vs.update(self.validity.variables())
            self._vars = tuple(sorted(vs))
        return self._vars

    def full_polynomial(self) -> Polynomial:
        """cost + C * validity as one flat polynomial (can be large)."""
        if self._full is None:
            self._full = self.cost + self.validity.materialize().scale(self.penalty_C)
        return self._full

    def energy(self, x: Mapping) -> float:
        return self.cost.evaluate(x) + self.penalty_C * self.validity.value(x)

    def true_cost_of(self, x: Mapping) -> float:
        """Unnormalized cost part of the energy at x."""
        return self.cost_scale * self.cost.evaluate(x)


def assemble(cost: CostHubo, validity: ValidityParts, semantics: Semantics,
             method: Method, heuristic_n: int | None = None) -> Problem:
    """Normalize the cost and scale validity by C = normalized cost at all-ones.

    Every validity block takes nonnegative integer values, so any infeasible
    assignment pays at least C while every feasible plan costs less than C
    (it activates a strict subset of the cost terms).
    """
    if len(cost.poly) == 0:
        raise FormulationError("cost polynomial is empty")
    norm, scale = cost.poly.normalize()
    penalty = sum(norm.terms.values())
    return Problem(
        method=Method(method),
        semantics=Semantics(semantics),
        graph=cost.graph,
        cost=norm,
        cost_scale=scale,
        validity=validity,
        penalty_C=penalty,
        plan_terms=cost.full_plan_terms(),
        heuristic_n=heuristic_n,
    )


def build_problem(g: QueryGraph, method, heuristic_n: int | None = None) -> Problem:
    method = Method(method)
    if method is Method.HEURISTIC:
        if heuristic_n is None:
            raise FormulationError("heuristic method requires the frontier width n")
        cost = build_heuristic_cost(g, heuristic_n)
        return assemble(cost, build_validity_dependent(cost),
                        Semantics.ONE_PER_RANK, method, heuristic_n=heuristic_n)
    if method is Method.PRECISE1:
        cost = build_precise_cost(g)
        return assemble(cost, build_validity_dependent(cost),
                        Semantics.ONE_PER_RANK, method)
    cost = build_precise_cost(g)
    validity, semantics = build_validity_independent(g)
    return assemble(cost, validity, semantics, method)


def variable_count(g: QueryGraph, method) -> int:
    """Number of variables the formulation uses before any reduction."""
    method = Method(method)
    n = g.n_relations
    base = (n - 1) * g.n_edges
    if method is Method.PRECISE2 and _constraint_style(g) == "clique":
        return base + n * (n - 2)
    return base


# ---------------------------------------------------------------------------
# encoding and decoding


def _attach_edges(g: QueryGraph, order) -> list:
    """One connecting edge per rank for a left-deep order.

    Prefers the edge between consecutive order positions when it exists
    (required by the clique constraints), otherwise the smallest edge into
    the prefix.
    """
    out = []
    prefix = {order[0]}
    for r in range(len(order) - 1):
        new = order[r + 1]
        prev = order[r]
        lo, hi = min(prev, new), max(prev, new)
        if g.has_edge(lo, hi):
            out.append((lo, hi))
        else:
            cands = sorted(
                (min(t, new), max(t, new))
                for t in prefix
                if g.has_edge(min(t, new), max(t, new))
            )
            if not cands:
                raise FormulationError(
                    f"relation {new} has no edge into the prefix (cross product)")
            out.append(cands[0])
        prefix.add(new)
    return out


def _slack_decomposition(count: int, max_k: int) -> tuple:
    """Greedy largest-first write of count as a sum of distinct k <= max_k."""
    out = []
    left = count
    for k in range(max_k, 0, -1):
        if k <= left:
            out.append(k)
            left -= k
    if left:
        raise FormulationError(f"table count {count} not representable")
    return tuple(out)


def encode_order(problem: Problem, order) -> dict:
    """Assignment over the problem's variables encoding a left-deep order."""
    g = problem.graph
    n = g.n_relations
    if sorted(order) != list(range(n)):
        raise FormulationError("order must be a permutation of all relation ids")
    attach = _attach_edges(g, order)
    x = {v: 0 for v in problem.variables()}
    if problem.semantics is Semantics.ONE_PER_RANK:
        for r, (u, v) in enumerate(attach):
            x[JoinVar(u, v, r)] = 1
    else:
        for j, (u, v) in enumerate(attach):
            for r in range(j, n - 1):
                x[JoinVar(u, v, r)] = 1
    slack_tables = {v.table for v in problem.variables() if isinstance(v, CountSlack)}
    if slack_tables:
        counts = {i: 0 for i in range(n)}
        for u, v in attach:
            counts[u] += 1
            counts[v] += 1
        for i in sorted(slack_tables):
            for k in _slack_decomposition(counts[i] - 1, n - 2):
                x[CountSlack(i, k)] = 1
    return x


def _order_from_attach(g: QueryGraph, attach) -> list:
    """Rebuild the order from one attach edge per rank; error when a rank
    does not add exactly one new relation."""
    u, v = attach[0]
    order = [u, v]
    seen = {u, v}
    for r in range(1, len(attach)):
        a, b = attach[r]
        a_in = a in seen
        if a_in == (b in seen):
            raise FormulationError(
                f"rank {r} join ({a},{b}) does not attach one new relation")
        new = b if a_in else a
        order.append(new)
        seen.add(new)
    return order


def _active_join_vars(problem: Problem, x: Mapping) -> dict:
    ranks = problem.graph.n_relations - 1
    active = {r: [] for r in range(ranks)}
    for var in problem.variables():
        if isinstance(var, JoinVar) and x[var]:
            active[var.rank].append((var.u, var.v))
    return active


def _first_activation(active: dict) -> dict:
    fa: dict = {}
    for r in sorted(active):
        for e in active[r]:
            fa.setdefault(e, r)
    return fa


def _canonical_order(g: QueryGraph) -> list:
    order = [0]
    prefix = {0}
    while len(order) < g.n_relations:
        nxt = min(
            t
            for p in prefix
            for t in g.neighbors(p)
            if t not in prefix
        )
        order.append(nxt)
        prefix.add(nxt)
    return order


_LENIENT_BUDGET = 200_000


def _lenient_order(g: QueryGraph, prefer: dict) -> list:
    """Backtracking repair: follow the preferred edges where they attach,
    fall back to any graph edge, and give up into the canonical order if the
    search budget runs out."""
    n = g.n_relations
    edges = [(u, v) for u, v, _f in g.edges]
    budget = [_LENIENT_BUDGET]

    def extend(order, seen, r):
        if r == n - 1:
            return order
        if budget[0] <= 0:
            return None
        budget[0] -= 1
        if r == 0:
            cands = list(prefer.get(0, []))
            cands.extend(e for e in edges if e not in set(cands))
            for u, v in cands:
                got = extend([u, v], {u, v}, 1)
                if got is not None:
                    return got
            return None
        pref = [e for e in prefer.get(r, []) if (e[0] in seen) != (e[1] in seen)]
        rest = [
            e for e in edges
            if (e[0] in seen) != (e[1] in seen) and e not in set(pref)
        ]
        for u, v in pref + rest:
            new = v if u in seen else u
            got = extend(order + [new], seen | {new}, r + 1)
            if got is not None:
                return got
        return None

    got = extend([], set(), 0)
    return got if got is not None else _canonical_order(g)


def decode(problem: Problem, x: Mapping, strict: bool = True) -> JoinTree:
    """Read a join tree out of an assignment.

    Strict mode requires the assignment to be exactly one valid plan under
    the problem's semantics. Lenient mode repairs spurious or missing
    activations and always returns an adherent tree.
    """
    g = problem.graph
    n = g.n_relations
    active = _active_join_vars(problem, x)
    if problem.semantics is Semantics.ONE_PER_RANK:
        if strict:
            attach = []
            for r in range(n - 1):
                if len(active[r]) != 1:
                    raise FormulationError(
                        f"rank {r} has {len(active[r])} active joins, expected 1")
                attach.append(active[r][0])
            order = _order_from_attach(g, attach)
        else:
            prefer = {r: sorted(active[r]) for r in active}
            order = _lenient_order(g, prefer)
    else:
        if strict:
            prev: set = set()
            attach = []
            for r in range(n - 1):
                cur = set(active[r])
                if len(cur) != r + 1 or not prev <= cur:
                    raise FormulationError(
                        f"rank {r} does not extend the previous joins by one")
                new = cur - prev
                attach.append(next(iter(new)))
                prev = cur
            order = _order_from_attach(g, attach)
        else:
            fa = _first_activation(active)
            prefer: dict = {}
            for e, r in fa.items():
                prefer.setdefault(r, []).append(e)
            prefer = {r: sorted(es) for r, es in prefer.items()}
            order = _lenient_order(g, prefer)
    tree = leftdeep_from_order(order)
    if not adheres(tree, g):
        raise FormulationError("decoded tree does not adhere to the query graph")
    return tree


def order_from_chain(chain: TermKey) -> list:
    """Left-deep order encoded by one full-plan term key."""
    by_rank = sorted(chain, key=lambda v: v.rank)
    u, v = by_rank[0].u, by_rank[0].v
    order = [u, v]
    seen = {u, v}
    for var in by_rank[1:]:
        new = var.v if var.u in seen else var.u
        order.append(new)
        seen.add(new)
    return order
