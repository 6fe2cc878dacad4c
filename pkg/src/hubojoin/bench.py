"""Experiment harness: seeded instance grids, solver runs, CSV reports.

Each (shape, size) cell gets `instances_per_cell` seeded random instances.
Every instance row carries the solver's plan cost next to the DP and greedy
reference costs; a per-cell aggregate row accumulates Σ true_cost over
Σ reference cost, which is the cumulative relative error the reports use.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import baselines
from .formulation import Method, Problem, build_problem, variable_count
from .querygraph import QueryGraph, Shape, generate_shape, sample_statistics
from .solvers import (
    EXACT_VARIABLE_CAP,
    AnnealParams,
    SolveResult,
    SolverError,
    solve_exact,
    solve_plan_oracle,
    solve_sa,
    solve_via_qubo,
)

SOLVER_NAMES = ("exact", "plan_oracle", "sa", "sa_qubo")

CSV_COLUMNS = (
    "shape", "n", "instance_seed", "method", "solver", "feasible",
    "true_cost", "dp_cross_cost", "dp_nocross_cost", "greedy_cost",
    "rel_to_dp_cross", "wall_time_ms", "variable_count",
)


class BenchError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    shapes: tuple
    sizes: tuple
    instances_per_cell: int = 20
    method: Method = Method.PRECISE1
    solver: str = "plan_oracle"
    heuristic_n: int = 1
    card_range: tuple = (10, 50)
    base_seed: int = 0
    anneal: AnnealParams = field(default_factory=AnnealParams)

    def __post_init__(self):
        if self.instances_per_cell < 1:
            raise BenchError("instances_per_cell must be >= 1")
        if not self.sizes or any(n < 2 for n in self.sizes):
            raise BenchError("sizes must all be >= 2")
        if not self.shapes:
            raise BenchError("at least one shape is required")
        for s in self.shapes:
            Shape(s)
        if self.solver not in SOLVER_NAMES:
            raise BenchError(f"unknown solver {self.solver!r}")
        Method(self.method)
        lo, hi = self.card_range
        if not (0 < lo <= hi):
            raise BenchError("card_range must satisfy 0 < lo <= hi")
        if self.heuristic_n < 1:
            raise BenchError("heuristic_n must be >= 1")


@dataclass
class ResultRow:
    shape: str
    n: int
    instance_seed: object  # int, or "aggregate" for the per-cell summary
    method: str
    solver: str
    feasible: Optional[bool]
    true_cost: Optional[float]
    dp_cross_cost: Optional[float]
    dp_nocross_cost: Optional[float]
    greedy_cost: Optional[float]
    rel_to_dp_cross: Optional[float]
    wall_time_ms: Optional[float]
    variable_count: Optional[int]


def derive_seed(base_seed: int, shape: str, n: int, index: int) -> int:
    text = f"{base_seed}|{shape}|{n}|{index}"
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def make_instance(shape, n: int, seed: int, card_range=(10, 50)) -> QueryGraph:
    g = generate_shape(Shape(shape), n, seed)
    return sample_statistics(g, card_range[0], card_range[1], seed)


def _run_solver(cfg: ExperimentConfig, problem: Problem) -> SolveResult:
    if cfg.solver == "exact":
        return solve_exact(problem)
    if cfg.solver == "plan_oracle":
        return solve_plan_oracle(problem.graph, problem)
    if cfg.solver == "sa":
        return solve_sa(problem, cfg.anneal)
    return solve_via_qubo(problem, params=cfg.anneal)


def _solver_applicable(cfg: ExperimentConfig, problem: Problem) -> bool:
    if cfg.solver == "exact":
        return len(problem.variables()) <= EXACT_VARIABLE_CAP
    return True


def run_instance(cfg: ExperimentConfig, shape, n: int, seed: int) -> ResultRow:
    g = make_instance(shape, n, seed, cfg.card_range)
    heuristic_n = cfg.heuristic_n if Method(cfg.method) is Method.HEURISTIC else None
    problem = build_problem(g, cfg.method, heuristic_n=heuristic_n)
    varcount = variable_count(g, cfg.method)

    dp_cross = None
    dp_nocross = None
    greedy = None
    try:
        _t, dp_cross = baselines.dp_with_cross(g)
    except baselines.BaselineError:
        dp_cross = None
    try:
        _t, dp_nocross = baselines.dp_without_cross(g)
    except baselines.BaselineError:
        dp_nocross = None
    _t, greedy = baselines.greedy_without_cross(g)

    feasible = None
    true_cost = None
    wall_ms = None
    if _solver_applicable(cfg, problem):
        try:
            result = _run_solver(cfg, problem)
        except SolverError:
            result = None
        if result is not None:
            feasible = result.feasible
            wall_ms = result.stats.wall_time * 1000.0
            if result.feasible:
                true_cost = result.true_cost

    reference = dp_cross if dp_cross is not None else dp_nocross
    rel = None
    if true_cost is not None and reference:
        rel = true_cost / reference
    return ResultRow(
        shape=str(Shape(shape).value), n=n, instance_seed=seed,
        method=str(Method(cfg.method).value), solver=cfg.solver,
        feasible=feasible, true_cost=true_cost,
        dp_cross_cost=dp_cross, dp_nocross_cost=dp_nocross,
        greedy_cost=greedy, rel_to_dp_cross=rel,
        wall_time_ms=wall_ms, variable_count=varcount,
    )


def _aggregate(cell_rows: list, cfg: ExperimentConfig) -> ResultRow:
    shape = cell_rows[0].shape
    n = cell_rows[0].n
    sum_true = 0.0
    sum_ref = 0.0
    sum_cross = 0.0
    sum_nocross = 0.0
    sum_greedy = 0.0
    sum_wall = 0.0
    have_pair = False
    have_wall = False
    feasible_all = True
    for row in cell_rows:
        if row.dp_cross_cost is not None:
            sum_cross += row.dp_cross_cost
        if row.dp_nocross_cost is not None:
            sum_nocross += row.dp_nocross_cost
        if row.greedy_cost is not None:
            sum_greedy += row.greedy_cost
        if row.wall_time_ms is not None:
            sum_wall += row.wall_time_ms
            have_wall = True
        if not row.feasible:
            feasible_all = False
        ref = row.dp_cross_cost if row.dp_cross_cost is not None else row.dp_nocross_cost
        if row.true_cost is not None and ref:
            sum_true += row.true_cost
            sum_ref += ref
            have_pair = True
    rel = sum_true / sum_ref if have_pair and sum_ref else None
    return ResultRow(
        shape=shape, n=n, instance_seed="aggregate",
        method=cell_rows[0].method, solver=cfg.solver,
        feasible=feasible_all if all(r.feasible is not None for r in cell_rows) else None,
        true_cost=sum_true if have_pair else None,
        dp_cross_cost=sum_cross if any(r.dp_cross_cost is not None for r in cell_rows) else None,
        dp_nocross_cost=sum_nocross if any(r.dp_nocross_cost is not None for r in cell_rows) else None,
        greedy_cost=sum_greedy,
        rel_to_dp_cross=rel,
        wall_time_ms=sum_wall if have_wall else None,
        variable_count=cell_rows[0].variable_count,
    )


def run_experiment(cfg: ExperimentConfig) -> list:
    """All instance rows plus one aggregate row per (shape, n) cell,
    ordered by (shape, n, instance index)."""
    rows: list = []
    for shape in sorted(Shape(s).value for s in cfg.shapes):
        for n in sorted(cfg.sizes):
            cell = []
            for index in range(cfg.instances_per_cell):
                seed = derive_seed(cfg.base_seed, shape, n, index)
                cell.append(run_instance(cfg, shape, n, seed))
            rows.extend(cell)
            rows.append(_aggregate(cell, cfg))
    return rows


# ---------------------------------------------------------------------------
# CSV in/out


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: Iterable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([
            _fmt(row.shape), _fmt(row.n), _fmt(row.instance_seed),
            _fmt(row.method), _fmt(row.solver), _fmt(row.feasible),
            _fmt(row.true_cost), _fmt(row.dp_cross_cost),
            _fmt(row.dp_nocross_cost), _fmt(row.greedy_cost),
            _fmt(row.rel_to_dp_cross), _fmt(row.wall_time_ms),
            _fmt(row.variable_count),
        ])
    return buf.getvalue()


def plotdata_from_csv(text: str) -> str:
    """Per-shape relative-cost series from a results CSV.

    One output line per aggregate row: shape, n, series (method/solver),
    value (cumulative relative cost)."""
    reader = csv.DictReader(io.StringIO(text))
    missing = [c for c in CSV_COLUMNS if c not in (reader.fieldnames or ())]
    if missing:
        raise BenchError(f"results CSV lacks columns: {', '.join(missing)}")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(("shape", "n", "series", "value"))
    for rec in reader:
        if rec["instance_seed"] != "aggregate" or not rec["rel_to_dp_cross"]:
            continue
        series = f"{rec['method']}/{rec['solver']}"
        writer.writerow((rec["shape"], rec["n"], series, rec["rel_to_dp_cross"]))
    return out.getvalue()
