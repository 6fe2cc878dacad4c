"""Minimizers for the assembled problems and for raw polynomials.

Three families:

* solve_exact — exhaustive enumeration over all assignments (vectorized in
  chunks; capped variable count).
* solve_plan_oracle — enumeration restricted to valid plan encodings; exact
  on the feasible set and much cheaper than full enumeration.
* solve_sa / solve_via_qubo — simulated annealing, natively on the
  higher-order objective or on its quadratic reduction.

The annealer keeps the structured objective (plain terms plus squared
groups) and computes single-flip energy deltas incrementally: per-term
inactive-variable counts for the plain part, per-group inner values for the
squared part. The hot loop is compiled with numba.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

import numpy as np
from numba import njit

from .baselines import BaselineError, greedy_without_cross
from .formulation import (FormulationError, Method, Problem, Semantics,
                          decode, encode_order)
from .jointree import JoinTree, cost as tree_cost, order_of
from .pbpoly import Polynomial, VariableId, term_key
from .quadratization import ReductionMethod, lift, reduce as reduce_poly
from .querygraph import QueryGraph


class SolverError(RuntimeError):
    pass


EXACT_VARIABLE_CAP = 26
_EXACT_CHUNK = 1 << 20
PLAN_BUDGET = 10_000_000
_AUTO_OPS_BUDGET = 32_000_000  # per-read proposal work when sweeps is None


@dataclass(frozen=True)
class BetaSchedule:
    """Inverse-temperature ramp for annealing.

    beta_min/beta_max of None are derived from the target.  For a Problem
    the scale that matters is the constraint weight C: the ramp starts hot
    enough to cross penalty barriers freely and ends where violations are
    suppressed but hops between feasible states still happen now and then.
    For a bare polynomial the bounds come from per-variable energy scales.
    """

    beta_min: float | None = None
    beta_max: float | None = None
    curve: str = "geometric"  # or "linear"

    def __post_init__(self):
        for b in (self.beta_min, self.beta_max):
            if b is not None and not (b > 0.0):
                raise ValueError("beta values must be positive")
        if (self.beta_min is not None and self.beta_max is not None
                and self.beta_min > self.beta_max):
            raise ValueError("need beta_min <= beta_max")
        if self.curve not in ("geometric", "linear"):
            raise ValueError(f"unknown schedule curve {self.curve!r}")


@dataclass(frozen=True)
class AnnealParams:
    sweeps: int | None = None  # flip proposals per read; None: 1000*|vars|
    reads: int = 20
    beta_schedule: BetaSchedule = field(default_factory=BetaSchedule)
    seed: int = 0

    def __post_init__(self):
        if self.sweeps is not None and self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if self.reads < 1:
            raise ValueError("reads must be >= 1")


@dataclass(frozen=True)
class SolveStats:
    evaluations: int
    sweeps: int
    seed: int | None
    wall_time: float


@dataclass(frozen=True)
class SolveResult:
    assignment: dict
    energy: float
    feasible: bool
    decoded: Optional[JoinTree]
    true_cost: Optional[float]
    stats: SolveStats


# ---------------------------------------------------------------------------
# shared objective structure


@dataclass
class _Objective:
    variables: tuple
    index: dict
    constant: float
    plain: list  # (term key, coeff), no constant entry
    groups: list  # (weight, constant, members=((key, coeff), ...))
    problem: Optional[Problem]


def _structure(target: Union[Polynomial, Problem]) -> _Objective:
    if isinstance(target, Problem):
        problem = target
        variables = tuple(problem.variables())
        acc: dict = {}
        for key, coeff in problem.cost.terms.items():
            if key:
                acc[key] = acc.get(key, 0.0) + coeff
        constant = problem.cost.constant
        c = problem.penalty_C
        vplain = problem.validity.plain
        for key, coeff in vplain.terms.items():
            if key:
                acc[key] = acc.get(key, 0.0) + c * coeff
            else:
                constant += c * coeff
        groups = [(c, grp.constant, grp.members) for grp in problem.validity.groups]
        plain = sorted(acc.items(), key=lambda kv: (len(kv[0]), kv[0]))
        return _Objective(variables, {v: i for i, v in enumerate(variables)},
                          constant, plain, groups, problem)
    poly = target
    variables = tuple(sorted(poly.variables()))
    plain = [(k, c) for k, c in sorted(poly.terms.items(),
                                       key=lambda kv: (len(kv[0]), kv[0])) if k]
    return _Objective(variables, {v: i for i, v in enumerate(variables)},
                      poly.constant, plain, [], None)


def _finish(obj: _Objective, assignment: dict, energy: float,
            evaluations: int, sweeps: int, seed, t0: float) -> SolveResult:
    feasible = False
    decoded = None
    true_cost = None
    if obj.problem is not None:
        try:
            decoded = decode(obj.problem, assignment, strict=True)
            feasible = True
            true_cost = tree_cost(decoded, obj.problem.graph)
        except FormulationError:
            decoded = None
    stats = SolveStats(evaluations=evaluations, sweeps=sweeps, seed=seed,
                       wall_time=time.perf_counter() - t0)
    return SolveResult(assignment=assignment, energy=energy, feasible=feasible,
                       decoded=decoded, true_cost=true_cost, stats=stats)


# ---------------------------------------------------------------------------
# exhaustive search


def solve_exact(target: Union[Polynomial, Problem],
                cap: int = EXACT_VARIABLE_CAP) -> SolveResult:
    """Global minimum by enumeration; ties go to the lexicographically
    smallest assignment (variables in sorted order, 0 before 1)."""
    t0 = time.perf_counter()
    obj = _structure(target)
    n = len(obj.variables)
    if n > cap:
        raise SolverError(f"{n} variables exceed the exhaustive cap of {cap}")
    if n == 0:
        return _finish(obj, {}, obj.constant, 1, 0, None, t0)

    # variable i maps to bit (n-1-i) so ascending integers scan assignments
    # in lexicographic order and the first minimum hit wins ties
    def mask_of(key) -> int:
        m = 0
        for v in key:
            m |= 1 << (n - 1 - obj.index[v])
        return m

    plain_masks = np.array([mask_of(k) for k, _c in obj.plain], dtype=np.int64)
    plain_coeffs = np.array([c for _k, c in obj.plain], dtype=np.float64)
    group_data = []
    for weight, const, members in obj.groups:
        masks = np.array([mask_of(k) for k, _c in members], dtype=np.int64)
        coeffs = np.array([c for _k, c in members], dtype=np.float64)
        group_data.append((weight, const, masks, coeffs))

    total = 1 << n
    best_energy = np.inf
    best_state = 0
    for lo in range(0, total, _EXACT_CHUNK):
        hi = min(lo + _EXACT_CHUNK, total)
        states = np.arange(lo, hi, dtype=np.int64)
        energy = np.full(states.shape, obj.constant, dtype=np.float64)
        for m, c in zip(plain_masks, plain_coeffs):
            energy += c * ((states & m) == m)
        for weight, const, masks, coeffs in group_data:
            inner = np.full(states.shape, const, dtype=np.float64)
            for m, c in zip(masks, coeffs):
                inner += c * ((states & m) == m)
            energy += weight * inner * inner
        pos = int(np.argmin(energy))
        if energy[pos] < best_energy:
            best_energy = float(energy[pos])
            best_state = lo + pos
    assignment = {
        v: (best_state >> (n - 1 - i)) & 1 for i, v in enumerate(obj.variables)
    }
    return _finish(obj, assignment, best_energy, total, 0, None, t0)


# ---------------------------------------------------------------------------
# plan-space oracle


def _chain_by_rank(chain) -> list:
    return sorted(chain, key=lambda v: v.rank)


def solve_plan_oracle(g: QueryGraph, p: Problem,
                      budget: int = PLAN_BUDGET) -> SolveResult:
    """Minimum over valid plan encodings only.

    For cost-dependent validity the expressible plans are exactly the
    full-plan cost terms, so those are walked directly (this matters for the
    heuristic, where pruning shrinks the expressible set). Otherwise every
    adherent left-deep order is enumerated and encoded canonically.
    """
    t0 = time.perf_counter()
    if p.graph is not g and p.graph != g:
        raise SolverError("problem was built for a different graph")
    n = g.n_relations
    if p.method is Method.HEURISTIC:
        chains = p.plan_terms
        if len(chains) > budget:
            raise SolverError("plan enumeration budget exceeded")
        if not chains:
            raise SolverError("no expressible plans")
        best_energy = np.inf
        best_chain = None
        for chain in chains:
            ranked = _chain_by_rank(chain)
            e = 0.0
            for j in range(1, len(ranked) + 1):
                e += p.cost.coefficient(term_key(ranked[:j]))
            if e < best_energy:
                best_energy = e
                best_chain = chain
        x = {v: 0 for v in p.variables()}
        for var in best_chain:
            x[var] = 1
        evaluations = len(chains)
    else:
        best = _best_order_by_cost(g, budget)
        best_order, _cost, evaluations = best
        x = encode_order(p, best_order)
    energy = p.energy(x)
    return _finish(_structure(p), x, energy, evaluations, 0, None, t0)


def _best_order_by_cost(g: QueryGraph, budget: int):
    """Cheapest adherent left-deep order by direct cost accumulation."""
    n = g.n_relations
    count = 0
    best_cost = np.inf
    best_order = None

    def extend(order, members, card, acc):
        nonlocal count, best_cost, best_order
        if len(order) == n:
            count += 1
            if count > budget:
                raise SolverError("plan enumeration budget exceeded")
            if acc < best_cost:
                best_cost = acc
                best_order = list(order)
            return
        for t in range(n):
            if t in members:
                continue
            sels = [g.selectivity(m, t) for m in sorted(members) if g.has_edge(min(m, t), max(m, t))]
            if not sels:
                continue
            newcard = card * g.cardinality_of(t)
            for s in sels:
                newcard *= s
            extend(order + [t], members | {t}, newcard, acc + newcard)

    for a in range(n):
        for b in range(n):
            if b == a:
                continue
            u, v = min(a, b), max(a, b)
            if not g.has_edge(u, v):
                continue
            card = g.selectivity(u, v) * g.cardinality_of(a) * g.cardinality_of(b)
            extend([a, b], {a, b}, card, card)
    if best_order is None:
        raise SolverError("no adherent order exists")
    return best_order, best_cost, count


# ---------------------------------------------------------------------------
# simulated annealing

U64 = np.uint64
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True)
def _mix64(z):
    z = (z + U64(0x9E3779B97F4A7C15)) & U64(0xFFFFFFFFFFFFFFFF)
    z = ((z ^ (z >> U64(30))) * U64(0xBF58476D1CE4E5B9)) & U64(0xFFFFFFFFFFFFFFFF)
    z = ((z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)) & U64(0xFFFFFFFFFFFFFFFF)
    return z ^ (z >> U64(31))


@njit(cache=True)
def _sa_kernel(n_vars, c0,
               tcoef, tv_off, tv_vars, vt_off, vt_list,
               gw, gc, mcoef, mgrp, mv_off, mv_vars, vm_off, vm_list,
               n_steps, bmin, bmax, geometric, reads, seed, init_x, best_x):
    n_terms = tcoef.shape[0]
    n_members = mcoef.shape[0]
    n_groups = gw.shape[0]
    x = np.zeros(n_vars, dtype=np.uint8)
    seen_x = np.zeros(n_vars, dtype=np.uint8)  # best state visited this read
    tzero = np.zeros(n_terms, dtype=np.int64)
    mzero = np.zeros(n_members, dtype=np.int64)
    gval = np.zeros(n_groups, dtype=np.float64)
    gtmp = np.zeros(n_groups, dtype=np.float64)
    best_e = np.inf
    have_best = False
    log_ratio = np.log(bmax / bmin)
    span = bmax - bmin
    denom = 1.0
    if n_steps > 1:
        denom = float(n_steps - 1)
    nv64 = U64(n_vars)
    for read in range(reads):
        state = _mix64(U64(seed) + U64(read))
        state = _mix64(state + U64(0x632BE59BD9B4E019))
        if state == U64(0):
            state = U64(0x9E3779B97F4A7C15)
        if read < init_x.shape[0]:
            # caller-provided start (a feasible plan for problem targets)
            for j in range(n_vars):
                x[j] = init_x[read, j]
        else:
            # random start
            for j in range(n_vars):
                state ^= state >> U64(12)
                state = (state ^ (state << U64(25))) & U64(0xFFFFFFFFFFFFFFFF)
                state ^= state >> U64(27)
                out = (state * U64(0x2545F4914F6CDD1D)) & U64(0xFFFFFFFFFFFFFFFF)
                x[j] = np.uint8(out >> U64(63))
        # fresh bookkeeping
        e = c0
        for t in range(n_terms):
            z = 0
            for pos in range(tv_off[t], tv_off[t + 1]):
                if x[tv_vars[pos]] == 0:
                    z += 1
            tzero[t] = z
            if z == 0:
                e += tcoef[t]
        for k in range(n_groups):
            gval[k] = gc[k]
        for mi in range(n_members):
            z = 0
            for pos in range(mv_off[mi], mv_off[mi + 1]):
                if x[mv_vars[pos]] == 0:
                    z += 1
            mzero[mi] = z
            if z == 0:
                gval[mgrp[mi]] += mcoef[mi]
        for k in range(n_groups):
            e += gw[k] * gval[k] * gval[k]
        seen_e = e
        for j in range(n_vars):
            seen_x[j] = x[j]
        for step in range(n_steps):
            state ^= state >> U64(12)
            state = (state ^ (state << U64(25))) & U64(0xFFFFFFFFFFFFFFFF)
            state ^= state >> U64(27)
            out = (state * U64(0x2545F4914F6CDD1D)) & U64(0xFFFFFFFFFFFFFFFF)
            j = int(out % nv64)
            turning_on = x[j] == 0
            delta = 0.0
            for pos in range(vt_off[j], vt_off[j + 1]):
                t = vt_list[pos]
                if turning_on:
                    if tzero[t] == 1:
                        delta += tcoef[t]
                else:
                    if tzero[t] == 0:
                        delta -= tcoef[t]
            pos = vm_off[j]
            end = vm_off[j + 1]
            while pos < end:
                k = mgrp[vm_list[pos]]
                dv = 0.0
                while pos < end and mgrp[vm_list[pos]] == k:
                    mi = vm_list[pos]
                    if turning_on:
                        if mzero[mi] == 1:
                            dv += mcoef[mi]
                    else:
                        if mzero[mi] == 0:
                            dv -= mcoef[mi]
                    pos += 1
                if dv != 0.0:
                    old = gval[k]
                    new = old + dv
                    delta += gw[k] * (new * new - old * old)
            accept = delta <= 0.0
            if not accept:
                if geometric:
                    beta = bmin * np.exp(log_ratio * (step / denom))
                else:
                    beta = bmin + span * (step / denom)
                state ^= state >> U64(12)
                state = (state ^ (state << U64(25))) & U64(0xFFFFFFFFFFFFFFFF)
                state ^= state >> U64(27)
                out = (state * U64(0x2545F4914F6CDD1D)) & U64(0xFFFFFFFFFFFFFFFF)
                u = (out >> U64(11)) * _INV53
                accept = u < np.exp(-beta * delta)
            if accept:
                if turning_on:
                    for pos2 in range(vt_off[j], vt_off[j + 1]):
                        tzero[vt_list[pos2]] -= 1
                    for pos2 in range(vm_off[j], vm_off[j + 1]):
                        mi = vm_list[pos2]
                        mzero[mi] -= 1
                        if mzero[mi] == 0:
                            gval[mgrp[mi]] += mcoef[mi]
                    x[j] = 1
                else:
                    for pos2 in range(vt_off[j], vt_off[j + 1]):
                        tzero[vt_list[pos2]] += 1
                    for pos2 in range(vm_off[j], vm_off[j + 1]):
                        mi = vm_list[pos2]
                        if mzero[mi] == 0:
                            gval[mgrp[mi]] -= mcoef[mi]
                        mzero[mi] += 1
                    x[j] = 0
                e += delta
                if e < seen_e:
                    seen_e = e
                    for j2 in range(n_vars):
                        seen_x[j2] = x[j2]
        # exact energy of the best state visited this read, fixed summation order
        e = c0
        for t in range(n_terms):
            on = True
            for pos in range(tv_off[t], tv_off[t + 1]):
                if seen_x[tv_vars[pos]] == 0:
                    on = False
                    break
            if on:
                e += tcoef[t]
        for k in range(n_groups):
            gtmp[k] = gc[k]
        for mi in range(n_members):
            on = True
            for pos in range(mv_off[mi], mv_off[mi + 1]):
                if seen_x[mv_vars[pos]] == 0:
                    on = False
                    break
            if on:
                gtmp[mgrp[mi]] += mcoef[mi]
        for k in range(n_groups):
            e += gw[k] * gtmp[k] * gtmp[k]
        better = e < best_e
        if not better and e == best_e and have_best:
            for j in range(n_vars):
                if seen_x[j] != best_x[j]:
                    better = seen_x[j] < best_x[j]
                    break
        if better or not have_best:
            best_e = e
            have_best = True
            for j in range(n_vars):
                best_x[j] = seen_x[j]
    return best_e


def _csr(rows: list, n_cols_hint: int):
    """rows: list of int lists -> (offsets, flat) int64 arrays."""
    off = np.zeros(len(rows) + 1, dtype=np.int64)
    for i, row in enumerate(rows):
        off[i + 1] = off[i] + len(row)
    flat = np.zeros(int(off[-1]), dtype=np.int64)
    k = 0
    for row in rows:
        for item in row:
            flat[k] = item
            k += 1
    return off, flat


def _random_adherent_order(g: QueryGraph, rng: random.Random) -> list:
    """Uniform-ish random cross-product-free left-deep order."""
    u, v, _f = g.edges[rng.randrange(len(g.edges))]
    order = [u, v]
    members = {u, v}
    while len(order) < g.n_relations:
        cands = [t for t in range(g.n_relations)
                 if t not in members
                 and any(g.has_edge(min(t, m), max(t, m)) for m in members)]
        t = cands[rng.randrange(len(cands))]
        order.append(t)
        members.add(t)
    return order


def _plan_inits(problem: Problem, index: dict, n: int,
                reads: int, seed: int) -> np.ndarray:
    """One start state per read: a greedy warm start, then random plans.

    Random restarts from arbitrary bit strings waste most of the walk
    burning down penalty energy; starting every read at a feasible plan
    keeps the whole schedule in the region where plans trade against each
    other. The first read is warm-started from the greedy order (standard
    practice, and free insurance against a string of unlucky walks), the
    rest from random plans so coverage stays unbiased.
    """
    init = np.zeros((reads, n), dtype=np.uint8)
    rng = random.Random((seed or 0) & 0xFFFFFFFFFFFFFFFF)

    def fill(row: int, assignment: dict) -> None:
        for v, bit in assignment.items():
            if bit:
                i = index.get(v)
                if i is not None:
                    init[row, i] = 1

    start = 0
    try:
        tree, _c = greedy_without_cross(problem.graph)
        fill(0, encode_order(problem, list(order_of(tree))))
        start = 1
    except (BaselineError, FormulationError):
        pass
    if (problem.semantics is Semantics.ONE_PER_RANK
            and problem.method is not Method.PRECISE2):
        chains = problem.plan_terms
        if not chains:
            return init[:start]
        for r in range(start, reads):
            for v in chains[rng.randrange(len(chains))]:
                init[r, index[v]] = 1
    else:
        for r in range(start, reads):
            fill(r, encode_order(
                problem, _random_adherent_order(problem.graph, rng)))
    return init


def _auto_beta_range(obj: _Objective, n: int) -> tuple[float, float]:
    """Derive (beta_min, beta_max) for the annealing ramp.

    Constrained problems live on a penalty landscape where every barrier
    between feasible states has height of order the constraint weight C,
    while cost differences between feasible states are orders of magnitude
    smaller.  The productive regime is the narrow band where the walk keeps
    hopping between feasible basins without dissolving into the infeasible
    bulk, so both ends of the ramp scale with 1/C and stay close together;
    the window below was fixed by measurement on chain and star problems.

    For a bare polynomial there is no barrier structure to aim for; the
    bounds come from per-variable worst-case flip costs instead.
    """
    if obj.problem is not None:
        c = max(float(obj.problem.penalty_C), 1e-12)
        return 2.5 / c, 3.5 / c
    m = np.zeros(n, dtype=np.float64)
    for key, coeff in obj.plain:
        for v in key:
            m[obj.index[v]] += abs(coeff)
    dmax = max(float(m.max()), 1e-12)
    dmin = dmax
    for _key, coeff in obj.plain:
        a = abs(coeff)
        if 0.0 < a < dmin:
            dmin = a
    lo = math.log(2.0) / dmax
    hi = math.log(10_000.0) / dmin
    return lo, min(hi, lo * 1e8)


def solve_sa(target: Union[Polynomial, Problem],
             params: AnnealParams | None = None) -> SolveResult:
    """Single-flip Metropolis annealing, best of `reads` restarts.

    Each read starts from a fresh random state, walks `sweeps` single-flip
    proposals, and remembers the lowest-energy state it visited; the
    returned assignment is the best such state across reads, ties broken
    lexicographically.  Deterministic for a given seed.
    """
    t0 = time.perf_counter()
    if params is None:
        params = AnnealParams()
    obj = _structure(target)
    n = len(obj.variables)
    if n == 0:
        return _finish(obj, {}, obj.constant, 0, 0, params.seed, t0)

    tcoef = np.array([c for _k, c in obj.plain], dtype=np.float64)
    term_vars = [[obj.index[v] for v in k] for k, _c in obj.plain]
    tv_off, tv_vars = _csr(term_vars, n)
    var_terms: list = [[] for _ in range(n)]
    for t, row in enumerate(term_vars):
        for j in row:
            var_terms[j].append(t)
    vt_off, vt_list = _csr(var_terms, 0)

    gw = np.array([w for w, _c, _m in obj.groups], dtype=np.float64)
    gc = np.array([c for _w, c, _m in obj.groups], dtype=np.float64)
    mcoef_list: list = []
    mgrp_list: list = []
    member_vars: list = []
    for k, (_w, _c, members) in enumerate(obj.groups):
        for key, coeff in members:
            mcoef_list.append(coeff)
            mgrp_list.append(k)
            member_vars.append([obj.index[v] for v in key])
    mcoef = np.array(mcoef_list, dtype=np.float64)
    mgrp = np.array(mgrp_list, dtype=np.int64)
    mv_off, mv_vars = _csr(member_vars, n)
    var_members: list = [[] for _ in range(n)]
    for mi, row in enumerate(member_vars):
        for j in set(row):
            var_members[j].append(mi)
    for row in var_members:
        row.sort()
    vm_off, vm_list = _csr(var_members, 0)

    if params.sweeps is not None:
        steps = int(params.sweeps)
    else:
        # Sweeps sized to a fixed per-read work budget: a proposal's cost is
        # dominated by the adjacency lists it touches, so problems with thin
        # lists (whose landscapes also tend to need longer walks) get more
        # steps for the same wall time.
        adj = (vt_list.shape[0] + vm_list.shape[0]) / max(1, n)
        steps = int(_AUTO_OPS_BUDGET // max(1.0, adj))
        steps = max(1000 * n, min(steps, 20_000 * n))

    sched = params.beta_schedule
    auto_lo, auto_hi = _auto_beta_range(obj, n)
    beta_min = sched.beta_min if sched.beta_min is not None else auto_lo
    beta_max = sched.beta_max if sched.beta_max is not None else max(auto_hi, beta_min)
    if beta_min > beta_max:
        beta_max = beta_min
    if obj.problem is not None:
        init_x = _plan_inits(obj.problem, obj.index, n,
                             int(params.reads), int(params.seed))
    else:
        init_x = np.zeros((0, n), dtype=np.uint8)
    best_x = np.zeros(n, dtype=np.uint8)
    best_e = _sa_kernel(
        n, float(obj.constant),
        tcoef, tv_off, tv_vars, vt_off, vt_list,
        gw, gc, mcoef, mgrp, mv_off, mv_vars, vm_off, vm_list,
        int(steps), float(beta_min), float(beta_max),
        sched.curve == "geometric", int(params.reads),
        np.uint64(params.seed & 0xFFFFFFFFFFFFFFFF), init_x, best_x,
    )
    assignment = {v: int(best_x[i]) for i, v in enumerate(obj.variables)}
    return _finish(obj, assignment, float(best_e),
                   int(params.reads) * int(steps), int(steps), params.seed, t0)


def solve_via_qubo(target: Union[Polynomial, Problem],
                   method=ReductionMethod.MIXED,
                   params: AnnealParams | None = None) -> SolveResult:
    """Reduce to quadratic, anneal the reduction, lift, re-evaluate on the
    source objective."""
    t0 = time.perf_counter()
    obj = _structure(target)
    source = target.full_polynomial() if isinstance(target, Problem) else target
    reduced, rmap = reduce_poly(source, method)
    inner = solve_sa(reduced, params)
    lifted = lift(inner.assignment, rmap)
    assignment = dict(lifted.assignment)
    for v in obj.variables:
        if v not in assignment:
            assignment[v] = 0
    energy = source.evaluate(assignment)
    result = _finish(obj, assignment, energy,
                     inner.stats.evaluations, inner.stats.sweeps,
                     inner.stats.seed, t0)
    return result
