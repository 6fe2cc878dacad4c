"""Join ordering as higher-order binary optimization.

Builds HUBO formulations of left-deep join ordering over a query graph,
optionally reduces them to QUBO, solves them exactly or by simulated
annealing, and compares against dynamic-programming and greedy baselines.
"""

from .querygraph import (
    GraphError,
    QueryGraph,
    Shape,
    generate_shape,
    load_json,
    sample_statistics,
    save_json,
)
from .jointree import (
    Join,
    Leaf,
    adheres,
    cardinality,
    cost,
    is_left_deep,
    leftdeep_from_order,
    order_of,
    render,
)
from .pbpoly import (
    AuxVar,
    CountSlack,
    JoinVar,
    Polynomial,
    expand_squared_linear,
    parse_variable,
    term_key,
)
from .formulation import (
    CostHubo,
    FormulationError,
    Method,
    Problem,
    Semantics,
    SquaredGroup,
    ValidityParts,
    assemble,
    build_heuristic_cost,
    build_precise_cost,
    build_problem,
    build_validity_dependent,
    build_validity_independent,
    decode,
    encode_order,
    variable_count,
)
from .quadratization import (
    IntroducedAux,
    LiftResult,
    ReductionError,
    ReductionMap,
    ReductionMethod,
    export_qubo,
    lift,
    reduce,
)
from .solvers import (
    AnnealParams,
    BetaSchedule,
    SolveResult,
    SolveStats,
    SolverError,
    solve_exact,
    solve_plan_oracle,
    solve_sa,
    solve_via_qubo,
)
from .baselines import (
    BaselineError,
    dp_with_cross,
    dp_without_cross,
    greedy_without_cross,
)
from .bench import (
    BenchError,
    ExperimentConfig,
    ResultRow,
    derive_seed,
    make_instance,
    plotdata_from_csv,
    rows_to_csv,
    run_experiment,
    run_instance,
)

__version__ = "0.1.0"

__all__ = [
    "GraphError", "QueryGraph", "Shape", "generate_shape", "load_json",
    "sample_statistics", "save_json",
    "Join", "Leaf", "adheres", "cardinality", "cost", "is_left_deep",
    "leftdeep_from_order", "order_of", "render",
    "AuxVar", "CountSlack", "JoinVar", "Polynomial", "expand_squared_linear",
    "parse_variable", "term_key",
    "CostHubo", "FormulationError", "Method", "Problem", "Semantics",
    "SquaredGroup", "ValidityParts", "assemble", "build_heuristic_cost",
    "build_precise_cost", "build_problem", "build_validity_dependent",
    "build_validity_independent", "decode", "encode_order", "variable_count",
    "IntroducedAux", "LiftResult", "ReductionError", "ReductionMap",
    "ReductionMethod", "export_qubo", "lift", "reduce",
    "AnnealParams", "BetaSchedule", "SolveResult", "SolveStats", "SolverError",
    "solve_exact", "solve_plan_oracle", "solve_sa", "solve_via_qubo",
    "BaselineError", "dp_with_cross", "dp_without_cross",
    "greedy_without_cross",
    "BenchError", "ExperimentConfig", "ResultRow", "derive_seed",
    "make_instance", "plotdata_from_csv", "rows_to_csv", "run_experiment",
    "run_instance",
    "__version__",
]
