import itertools

import pytest

from hubojoin import (
    AnnealParams,
    BetaSchedule,
    JoinVar,
    Polynomial,
    ReductionMethod,
    build_problem,
    encode_order,
    make_instance,
    order_of,
    solve_exact,
    solve_plan_oracle,
    solve_sa,
    solve_via_qubo,
)
from hubojoin.solvers import SolverError

A = JoinVar(0, 1, 0)
B = JoinVar(1, 2, 0)


def test_exact_on_reference_problem(chain3):
    p = build_problem(chain3, "precise1")
    res = solve_exact(p)
    assert res.energy == pytest.approx(360.0 / 300.0)
    assert res.feasible
    assert order_of(res.decoded) == (1, 2, 0)
    assert res.true_cost == pytest.approx(360.0)
    assert res.stats.evaluations == 16  # 2^4 assignments scanned
    assert res.stats.seed is None


def test_exact_on_bare_polynomial():
    res = solve_exact(Polynomial({(A,): -1.0, (): 0.5}))
    assert res.energy == pytest.approx(-0.5)
    assert res.assignment == {A: 1}
    assert not res.feasible
    assert res.decoded is None
    assert res.true_cost is None


def test_exact_handles_constant_and_empty():
    assert solve_exact(Polynomial({(): 5.0})).energy == 5.0
    assert solve_exact(Polynomial()).energy == 0.0


def test_exact_breaks_ties_lexicographically():
    res = solve_exact(Polynomial({(A,): -1.0, (B,): -1.0, (A, B): 1.0}))
    assert res.energy == pytest.approx(-1.0)
    assert res.assignment == {A: 0, B: 1}


def test_exact_variable_cap():
    vars = [JoinVar(i, i + 1, 0) for i in range(27)]
    big = Polynomial({(v,): 1.0 for v in vars})
    with pytest.raises(SolverError):
        solve_exact(big)
    small = Polynomial({(v,): 1.0 for v in vars[:4]})
    with pytest.raises(SolverError):
        solve_exact(small, cap=3)


def test_exact_agrees_with_full_enumeration():
    g = make_instance("star", 4, seed=21)
    p = build_problem(g, "precise1")
    res = solve_exact(p)
    vars = p.variables()
    best = min(
        p.energy(dict(zip(vars, bits)))
        for bits in itertools.product([0, 1], repeat=len(vars))
    )
    assert res.energy == pytest.approx(best)


def test_plan_oracle_matches_exact(chain3):
    p = build_problem(chain3, "precise1")
    oracle = solve_plan_oracle(chain3, p)
    exact = solve_exact(p)
    assert oracle.energy == pytest.approx(exact.energy)
    assert oracle.feasible
    assert order_of(oracle.decoded) == (1, 2, 0)
    assert oracle.true_cost == pytest.approx(360.0)


def test_plan_oracle_on_larger_graph_matches_exact():
    g = make_instance("chain", 4, seed=13)
    p = build_problem(g, "precise2")
    oracle = solve_plan_oracle(g, p)
    exact = solve_exact(p)
    assert oracle.energy == pytest.approx(exact.energy, rel=1e-9)


def test_plan_oracle_walks_heuristic_plans(chain3):
    p = build_problem(chain3, "heuristic", 1)
    res = solve_plan_oracle(chain3, p)
    assert res.true_cost == pytest.approx(360.0)
    assert order_of(res.decoded) == (1, 2, 0)
    active = [v for v, bit in res.assignment.items() if bit]
    assert sorted(active) == sorted(p.plan_terms[0])
    assert res.stats.evaluations == len(p.plan_terms)


def test_plan_oracle_rejects_foreign_graph(chain3):
    other = make_instance("chain", 3, seed=99)
    p = build_problem(chain3, "precise1")
    with pytest.raises(SolverError):
        solve_plan_oracle(other, p)


def test_plan_oracle_budget(chain3):
    p = build_problem(chain3, "precise1")
    with pytest.raises(SolverError):
        solve_plan_oracle(chain3, p, budget=1)


def test_sa_solves_reference_problem(chain3):
    p = build_problem(chain3, "precise1")
    res = solve_sa(p, AnnealParams(sweeps=1000, reads=20, seed=7))
    assert res.feasible
    assert res.energy == pytest.approx(360.0 / 300.0)
    assert res.true_cost == pytest.approx(360.0)
    assert res.stats.sweeps == 1000
    assert res.stats.evaluations == 20_000
    assert res.stats.seed == 7


def test_sa_is_deterministic(chain3):
    p = build_problem(chain3, "precise2")
    params = AnnealParams(sweeps=500, reads=5, seed=123)
    r1 = solve_sa(p, params)
    r2 = solve_sa(p, params)
    assert r1.assignment == r2.assignment
    assert r1.energy == r2.energy
    assert r1.stats.evaluations == r2.stats.evaluations


def test_sa_remembers_best_visited_state():
    x = JoinVar(0, 1, 0)
    res = solve_sa(Polynomial({(x,): -1.0}), AnnealParams(sweeps=1, reads=5, seed=0))
    assert res.assignment[x] == 1
    assert res.energy == pytest.approx(-1.0)


def test_sa_energy_matches_reported_assignment(chain3):
    for method in ("precise1", "precise2"):
        p = build_problem(chain3, method)
        res = solve_sa(p, AnnealParams(sweeps=800, reads=4, seed=5))
        assert res.energy == pytest.approx(p.energy(res.assignment), rel=1e-9)


def test_sa_never_beats_exact_and_never_loses_to_an_encoding():
    g = make_instance("star", 4, seed=17)
    p = build_problem(g, "precise1")
    exact = solve_exact(p)
    sa = solve_sa(p, AnnealParams(sweeps=2000, reads=10, seed=11))
    some_plan = encode_order(p, [0, 1, 2, 3])
    assert exact.energy <= sa.energy + 1e-9
    assert sa.energy <= p.energy(some_plan) + 1e-9


def test_sa_auto_schedule_defaults(chain3):
    p = build_problem(chain3, "precise1")
    res = solve_sa(p, AnnealParams(reads=2, seed=3))
    n = len(p.variables())
    assert 1000 * n <= res.stats.sweeps <= 20_000 * n
    assert res.feasible


def test_via_qubo_solves_reference_problem(chain3):
    p = build_problem(chain3, "precise1")
    res = solve_via_qubo(p, params=AnnealParams(sweeps=2000, reads=10, seed=2))
    assert res.feasible
    assert res.energy == pytest.approx(360.0 / 300.0)
    assert order_of(res.decoded) == (1, 2, 0)
    assert res.true_cost == pytest.approx(360.0)


def test_via_qubo_each_reduction_method(chain3):
    p = build_problem(chain3, "precise1")
    for method in ReductionMethod:
        res = solve_via_qubo(p, method=method,
                             params=AnnealParams(sweeps=2000, reads=10, seed=4))
        assert res.energy == pytest.approx(360.0 / 300.0)


def test_via_qubo_quadratic_input_matches_native():
    poly = Polynomial({(A,): 1.0, (B,): -2.0, (A, B): 3.0})
    params = AnnealParams(sweeps=300, reads=3, seed=9)
    native = solve_sa(poly, params)
    via = solve_via_qubo(poly, params=params)
    assert via.energy == pytest.approx(native.energy)
    assert via.energy == pytest.approx(-2.0)


def test_anneal_params_validation():
    with pytest.raises(ValueError):
        AnnealParams(sweeps=0)
    with pytest.raises(ValueError):
        AnnealParams(reads=0)
    with pytest.raises(ValueError):
        BetaSchedule(beta_min=-1.0)
    with pytest.raises(ValueError):
        BetaSchedule(beta_min=2.0, beta_max=1.0)
    with pytest.raises(ValueError):
        BetaSchedule(curve="exponential")


def test_explicit_beta_schedule_is_honored(chain3):
    p = build_problem(chain3, "precise1")
    sched = BetaSchedule(beta_min=0.1, beta_max=50.0, curve="linear")
    res = solve_sa(p, AnnealParams(sweeps=1000, reads=20, seed=1,
                                   beta_schedule=sched))
    assert res.energy == pytest.approx(360.0 / 300.0)
