"""Command-line interface.

Subcommands: generate, formulate, reduce, solve, baseline, bench, plotdata.
Exit codes: 0 success, 1 usage error, 2 runtime error. Diagnostics go to
stderr; data goes to stdout or --out files.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import baselines
from .bench import (
    BenchError,
    ExperimentConfig,
    make_instance,
    plotdata_from_csv,
    rows_to_csv,
    run_experiment,
)
from .formulation import Method, Problem, build_problem, variable_count
from .jointree import order_of, render
from .pbpoly import Polynomial
from .quadratization import ReductionMethod, export_qubo, reduce as reduce_poly
from .querygraph import load_json, save_json
from .solvers import (
    AnnealParams,
    BetaSchedule,
    solve_exact,
    solve_plan_oracle,
    solve_sa,
    solve_via_qubo,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_bytes(path: str | None) -> bytes:
    if path is None or path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _read_text(path: str | None) -> str:
    return _read_bytes(path).decode("utf-8")


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_sizes(spec: str) -> tuple:
    sizes = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                lo_s, hi_s = part.split("-", 1)
                lo, hi = int(lo_s), int(hi_s)
                if hi < lo:
                    raise UsageError(f"bad size range {part!r}")
                sizes.extend(range(lo, hi + 1))
            else:
                sizes.append(int(part))
        except ValueError:
            raise UsageError(f"bad size {part!r}") from None
    if not sizes:
        raise UsageError("no sizes given")
    return tuple(sizes)


def _anneal_from_args(args) -> AnnealParams:
    return AnnealParams(
        sweeps=args.sa_sweeps,
        reads=args.sa_reads,
        beta_schedule=BetaSchedule(beta_min=args.sa_beta_min,
                                   beta_max=args.sa_beta_max,
                                   curve=args.sa_curve),
        seed=args.sa_seed,
    )


def _add_anneal_flags(sub) -> None:
    sub.add_argument("--sa-sweeps", type=int, default=None,
                     help="flip proposals per read (default 1000*|vars|)")
    sub.add_argument("--sa-reads", type=int, default=20)
    sub.add_argument("--sa-beta-min", type=float, default=None,
                     help="override the auto-derived hot inverse temperature")
    sub.add_argument("--sa-beta-max", type=float, default=None,
                     help="override the auto-derived cold inverse temperature")
    sub.add_argument("--sa-curve", choices=("geometric", "linear"),
                     default="geometric")
    sub.add_argument("--sa-seed", type=int, default=0)


def _cmd_generate(args) -> int:
    g = make_instance(args.shape, args.n, args.seed,
                      (args.card_lo, args.card_hi))
    data = save_json(g)
    if args.out is None or args.out == "-":
        sys.stdout.buffer.write(data)
    else:
        with open(args.out, "wb") as fh:
            fh.write(data)
    return 0


def _cmd_formulate(args) -> int:
    g = load_json(_read_bytes(args.graph))
    heuristic_n = args.heuristic_n if Method(args.method) is Method.HEURISTIC else None
    problem = build_problem(g, args.method, heuristic_n=heuristic_n)
    count = variable_count(g, args.method)
    print(f"{count} variables", file=sys.stderr)
    dump = problem.full_polynomial().dump()
    sidecar = {
        "method": problem.method.value,
        "semantics": problem.semantics.value,
        "cost_scale": problem.cost_scale,
        "penalty_C": problem.penalty_C,
        "heuristic_n": problem.heuristic_n,
        "graph": json.loads(save_json(g)),
    }
    if args.out is None:
        sys.stdout.write(dump)
    else:
        with open(args.out + ".hubo", "w", encoding="utf-8") as fh:
            fh.write(dump)
        with open(args.out + ".json", "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, indent=1, sort_keys=True)
            fh.write("\n")
        print(f"wrote {args.out}.hubo and {args.out}.json", file=sys.stderr)
    return 0


def _cmd_reduce(args) -> int:
    poly = Polynomial.parse(_read_text(args.problem))
    reduced, rmap = reduce_poly(poly, ReductionMethod(args.method))
    print(f"{len(rmap.introduced)} auxiliary variables", file=sys.stderr)
    _write_text(args.out, export_qubo(reduced))
    return 0


def _load_problem_from_dump(prefix: str) -> Problem:
    path = prefix
    for suffix in (".json", ".hubo"):
        if path.endswith(suffix):
            path = path[:-len(suffix)]
            break
    with open(path + ".json", "r", encoding="utf-8") as fh:
        sidecar = json.load(fh)
    g = load_json(json.dumps(sidecar["graph"]).encode("utf-8"))
    return build_problem(g, sidecar["method"],
                         heuristic_n=sidecar.get("heuristic_n"))


def _cmd_solve(args) -> int:
    problem = _load_problem_from_dump(args.problem)
    if args.solver == "exact":
        result = solve_exact(problem)
    elif args.solver == "plan_oracle":
        result = solve_plan_oracle(problem.graph, problem)
    elif args.solver == "sa":
        result = solve_sa(problem, _anneal_from_args(args))
    else:
        result = solve_via_qubo(problem, params=_anneal_from_args(args))
    payload = {
        "solver": args.solver,
        "energy": result.energy,
        "feasible": result.feasible,
        "true_cost": result.true_cost,
        "decoded": render(result.decoded) if result.decoded is not None else None,
        "order": order_of(result.decoded) if result.decoded is not None else None,
        "assignment": {str(v): int(b) for v, b in sorted(result.assignment.items())},
        "stats": {
            "evaluations": result.stats.evaluations,
            "sweeps": result.stats.sweeps,
            "seed": result.stats.seed,
            "wall_time": result.stats.wall_time,
        },
    }
    _write_text(args.out, json.dumps(payload, indent=1, sort_keys=True) + "\n")
    return 0


def _cmd_baseline(args) -> int:
    g = load_json(_read_bytes(args.graph))
    payload = {}
    try:
        tree, cost = baselines.dp_with_cross(g)
        payload["dp_with_cross"] = {"cost": cost, "order": order_of(tree)}
    except baselines.BaselineError as exc:
        payload["dp_with_cross"] = None
        print(f"dp_with_cross skipped: {exc}", file=sys.stderr)
    try:
        tree, cost = baselines.dp_without_cross(g)
        payload["dp_without_cross"] = {"cost": cost, "order": order_of(tree)}
    except baselines.BaselineError as exc:
        payload["dp_without_cross"] = None
        print(f"dp_without_cross skipped: {exc}", file=sys.stderr)
    tree, cost = baselines.greedy_without_cross(g)
    payload["greedy_without_cross"] = {"cost": cost, "order": order_of(tree)}
    _write_text(args.out, json.dumps(payload, indent=1, sort_keys=True) + "\n")
    return 0


def _cmd_bench(args) -> int:
    base = {}
    if args.config is not None:
        base = json.loads(_read_text(args.config))
    shapes = tuple(args.shapes.split(",")) if args.shapes else tuple(base.get("shapes", ()))
    sizes = _parse_sizes(args.sizes) if args.sizes else tuple(base.get("sizes", ()))
    anneal_cfg = base.get("anneal", {})
    sched_cfg = anneal_cfg.get("beta_schedule", {})
    anneal = AnnealParams(
        sweeps=args.sa_sweeps if args.sa_sweeps is not None else anneal_cfg.get("sweeps"),
        reads=args.sa_reads if args.sa_reads != 20 else anneal_cfg.get("reads", 20),
        beta_schedule=BetaSchedule(
            beta_min=sched_cfg.get("beta_min", args.sa_beta_min),
            beta_max=sched_cfg.get("beta_max", args.sa_beta_max),
            curve=sched_cfg.get("curve", args.sa_curve),
        ),
        seed=anneal_cfg.get("seed", args.sa_seed),
    )
    try:
        cfg = ExperimentConfig(
            shapes=shapes,
            sizes=sizes,
            instances_per_cell=(args.instances if args.instances is not None
                                else base.get("instances_per_cell", 20)),
            method=Method(args.method or base.get("method", "precise1")),
            solver=args.solver or base.get("solver", "plan_oracle"),
            heuristic_n=(args.heuristic_n if args.heuristic_n is not None
                         else base.get("heuristic_n", 1)),
            card_range=((args.card_lo, args.card_hi)
                        if args.card_lo is not None
                        else tuple(base.get("card_range", (10, 50)))),
            base_seed=(args.base_seed if args.base_seed is not None
                       else base.get("base_seed", 0)),
            anneal=anneal,
        )
    except (BenchError, ValueError) as exc:
        raise UsageError(str(exc))
    rows = run_experiment(cfg)
    _write_text(args.out, rows_to_csv(rows))
    return 0


def _cmd_plotdata(args) -> int:
    _write_text(args.out, plotdata_from_csv(_read_text(args.results)))
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="hubojoin", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("generate", help="emit a random query graph as JSON")
    sub.add_argument("--shape", required=True,
                     choices=("chain", "star", "cycle", "tree", "clique"))
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--card-lo", type=int, default=10)
    sub.add_argument("--card-hi", type=int, default=50)
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=_cmd_generate)

    sub = subs.add_parser("formulate", help="graph JSON -> problem dump")
    sub.add_argument("--graph", default=None, help="graph JSON file (default stdin)")
    sub.add_argument("--method", required=True,
                     choices=("precise1", "precise2", "heuristic"))
    sub.add_argument("--heuristic-n", type=int, default=1)
    sub.add_argument("--out", default=None,
                     help="prefix for <out>.hubo and <out>.json")
    sub.set_defaults(func=_cmd_formulate)

    sub = subs.add_parser("reduce", help="problem dump -> QUBO coordinate file")
    sub.add_argument("--problem", default=None,
                     help="polynomial dump file (default stdin)")
    sub.add_argument("--method", default="mixed",
                     choices=("min_selection", "substitution", "mixed"))
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=_cmd_reduce)

    sub = subs.add_parser("solve", help="solve a formulated problem")
    sub.add_argument("--problem", required=True,
                     help="dump prefix (expects <prefix>.json next to <prefix>.hubo)")
    sub.add_argument("--solver", default="sa",
                     choices=("exact", "plan_oracle", "sa", "sa_qubo"))
    _add_anneal_flags(sub)
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=_cmd_solve)

    sub = subs.add_parser("baseline", help="DP and greedy reference costs")
    sub.add_argument("--graph", default=None)
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=_cmd_baseline)

    sub = subs.add_parser("bench", help="run an experiment grid to CSV")
    sub.add_argument("--config", default=None, help="JSON config file")
    sub.add_argument("--shapes", default=None, help="comma list, e.g. chain,star")
    sub.add_argument("--sizes", default=None, help="e.g. 3-7 or 3,5,8")
    sub.add_argument("--instances", type=int, default=None)
    sub.add_argument("--method", default=None,
                     choices=("precise1", "precise2", "heuristic"))
    sub.add_argument("--solver", default=None,
                     choices=("exact", "plan_oracle", "sa", "sa_qubo"))
    sub.add_argument("--heuristic-n", type=int, default=None)
    sub.add_argument("--card-lo", type=int, default=None)
    sub.add_argument("--card-hi", type=int, default=50)
    sub.add_argument("--base-seed", type=int, default=None)
    _add_anneal_flags(sub)
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=_cmd_bench)

    sub = subs.add_parser("plotdata", help="results CSV -> per-shape series CSV")
    sub.add_argument("--results", default=None, help="results CSV (default stdin)")
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=_cmd_plotdata)
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        code = exc.code
        return int(code) if code else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failures map to exit 2
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
