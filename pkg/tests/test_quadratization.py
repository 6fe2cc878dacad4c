import itertools

import pytest
from hypothesis import given, strategies as st

from hubojoin import (
    AuxVar,
    JoinVar,
    Polynomial,
    ReductionMethod,
    export_qubo,
    lift,
    reduce,
)
from hubojoin.quadratization import ReductionError

A = JoinVar(0, 1, 0)
B = JoinVar(1, 2, 0)
C = JoinVar(2, 3, 0)
D = JoinVar(3, 4, 0)
W0 = AuxVar(0)


def brute_min(p):
    vars = sorted(p.variables())
    best = float("inf")
    for bits in itertools.product([0, 1], repeat=len(vars)):
        val = p.evaluate(dict(zip(vars, bits)))
        if val < best:
            best = val
    return best if vars else p.constant


def test_quadratic_input_passes_through():
    p = Polynomial({(A,): 1.0, (A, B): -2.0, (): 3.0})
    for method in ReductionMethod:
        q, m = reduce(p, method)
        assert q == p
        assert m.introduced == ()
        assert m.aux_variables() == frozenset()


def test_negative_cubic_min_selection_terms():
    p = Polynomial({(A, B, C): -2.0})
    q, m = reduce(p, ReductionMethod.MIN_SELECTION)
    assert q == Polynomial(
        {(A, W0): -2.0, (B, W0): -2.0, (C, W0): -2.0, (W0,): 4.0}
    )
    assert len(m.introduced) == 1
    entry = m.introduced[0]
    assert entry.aux == W0
    assert entry.defines == (A, B, C)
    assert entry.flips == (False, False, False)
    assert entry.penalty_weight == 2.0
    assert entry.scheme == "min_selection"
    assert brute_min(q) == brute_min(p) == -2.0


def test_positive_cubic_min_selection_terms():
    p = Polynomial({(A, B, C): 2.0})
    q, m = reduce(p, ReductionMethod.MIN_SELECTION)
    assert q == Polynomial(
        {
            (A, W0): 2.0,
            (B, W0): -2.0,
            (C, W0): -2.0,
            (W0,): 2.0,
            (B, C): 2.0,
        }
    )
    assert m.introduced[0].flips == (True, False, False)
    assert q.degree() == 2
    assert brute_min(q) == brute_min(p) == 0.0


def test_substitution_rewrites_most_frequent_pair():
    p = Polynomial({(A, B, C): 2.0, (A, B, D): -3.0, (C, D): 1.0})
    q, m = reduce(p, ReductionMethod.SUBSTITUTION)
    assert q.degree() == 2
    assert len(m.introduced) == 1
    entry = m.introduced[0]
    assert entry.defines == (A, B)  # appears in two cubic terms
    assert entry.penalty_weight == 1.0 + 5.0
    assert entry.scheme == "substitution"
    # rewritten products hang off the auxiliary
    assert q.coefficient([C, W0]) == 2.0
    assert q.coefficient([D, W0]) == -3.0
    # penalty block w(ab - 2aw - 2bw + 3w) with the chosen weight
    assert q.coefficient([A, B]) == 6.0
    assert q.coefficient([A, W0]) == -12.0
    assert q.coefficient([B, W0]) == -12.0
    assert q.coefficient([W0]) == 18.0
    assert brute_min(q) == brute_min(p)


def test_mixed_routes_by_sign():
    p = Polynomial({(A, B, C): -1.0, (A, B, D): 2.0})
    q, m = reduce(p, ReductionMethod.MIXED)
    assert q.degree() == 2
    assert [e.scheme for e in m.introduced] == ["min_selection", "substitution"]
    assert brute_min(q) == brute_min(p)


def test_degree_four_positive_iterates():
    p = Polynomial({(A, B, C, D): 1.0})
    q, m = reduce(p, ReductionMethod.SUBSTITUTION)
    assert q.degree() == 2
    assert len(m.introduced) == 2
    assert brute_min(q) == brute_min(p) == 0.0
    qn, mn = reduce(p, ReductionMethod.MIN_SELECTION)
    assert qn.degree() == 2
    assert brute_min(qn) == 0.0


def test_serial_numbering_skips_existing_auxiliaries():
    p = Polynomial({(A, B, C): -1.0, (AuxVar(5),): 0.5})
    q, m = reduce(p, ReductionMethod.MIN_SELECTION)
    assert m.introduced[0].aux == AuxVar(6)


def test_reduce_is_deterministic():
    p = Polynomial(
        {(A, B, C): 1.5, (B, C, D): -0.5, (A, C, D): 2.0, (A,): 1.0}
    )
    for method in ReductionMethod:
        q1, m1 = reduce(p, method)
        q2, m2 = reduce(p, method)
        assert q1.dump() == q2.dump()
        assert m1 == m2


def test_lift_projects_and_checks_consistency():
    p = Polynomial({(A, B, C): -1.0})
    q, m = reduce(p, ReductionMethod.MIN_SELECTION)
    w = m.introduced[0].aux
    good = lift({A: 1, B: 1, C: 1, w: 1}, m)
    assert good.assignment == {A: 1, B: 1, C: 1}
    assert not good.warning
    bad = lift({A: 1, B: 1, C: 1, w: 0}, m)
    assert bad.warning
    assert bad.inconsistent == (w,)
    assert w not in bad.assignment


def test_lift_respects_flipped_definitions():
    p = Polynomial({(A, B, C): 2.0})
    q, m = reduce(p, ReductionMethod.MIN_SELECTION)
    w = m.introduced[0].aux
    # w stands for (1 - A) * B * C
    okay = lift({A: 0, B: 1, C: 1, w: 1}, m)
    assert not okay.warning
    off = lift({A: 1, B: 1, C: 1, w: 1}, m)
    assert off.warning


def test_export_qubo_format():
    p = Polynomial({(A,): 1.5, (A, B): -2.0, (): 0.5})
    text = export_qubo(p)
    lines = text.splitlines()
    assert lines[0] == "# vars 2"
    assert lines[1] == "# offset 0.5"
    assert lines[2] == "0 0 1.5"
    assert lines[3] == "0 1 -2.0"
    assert lines[4] == "# legend"
    assert "# 0 x0-1r0" in lines
    assert "# 1 x1-2r0" in lines
    assert text.endswith("\n")


def test_export_qubo_rejects_higher_degree():
    with pytest.raises(ReductionError):
        export_qubo(Polynomial({(A, B, C): 1.0}))


@given(
    st.lists(
        st.tuples(
            st.sets(st.sampled_from([A, B, C, D]), min_size=1, max_size=3),
            st.integers(min_value=-3, max_value=3).filter(lambda c: c != 0),
        ),
        min_size=1,
        max_size=4,
    ),
    st.sampled_from(list(ReductionMethod)),
)
def test_reduction_preserves_minimum_value(raw_terms, method):
    p = Polynomial({tuple(vs): float(c) for vs, c in raw_terms})
    if len(p) == 0:
        return
    q, m = reduce(p, method)
    assert q.degree() <= 2
    assert brute_min(q) == pytest.approx(brute_min(p), abs=1e-9)
