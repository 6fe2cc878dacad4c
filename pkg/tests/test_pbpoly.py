import itertools
import math

import pytest
from hypothesis import given, strategies as st

from hubojoin import (
    AuxVar,
    CountSlack,
    JoinVar,
    Polynomial,
    expand_squared_linear,
    parse_variable,
    term_key,
)
from hubojoin.pbpoly import MissingVariableError, PolynomialError

A = JoinVar(0, 1, 0)
B = JoinVar(1, 2, 0)
C = JoinVar(1, 2, 1)
S = CountSlack(2, 3)
W = AuxVar(4)


def test_variable_string_forms():
    assert str(A) == "x0-1r0"
    assert str(C) == "x1-2r1"
    assert str(S) == "y2k3"
    assert str(W) == "w4"


def test_variable_ordering():
    # join vars before slacks before aux vars; lexicographic within a kind
    assert sorted([W, S, C, B, A]) == [A, B, C, S, W]
    assert JoinVar(0, 2, 5) < JoinVar(1, 2, 0)


def test_parse_variable_round_trip():
    for v in (A, B, C, S, W, JoinVar(10, 12, 7), CountSlack(0, 1), AuxVar(0)):
        assert parse_variable(str(v)) == v
    for bad in ("", "x1", "z0", "x0-1", "y2", "x0-1r", "0-1r0"):
        with pytest.raises(PolynomialError):
            parse_variable(bad)


def test_term_key_sorts_and_deduplicates():
    assert term_key([B, A, B]) == (A, B)
    assert term_key([]) == ()
    assert term_key([W, A, S]) == (A, S, W)


def test_init_coalesces_mirrored_keys():
    p = Polynomial({(A, B): 1.5, (B, A): 2.5, (A,): 1.0})
    assert p.coefficient([B, A]) == pytest.approx(4.0)
    assert p.coefficient([A]) == 1.0
    assert len(p) == 2


def test_init_prunes_near_zero_terms():
    p = Polynomial({(A,): 1e-13, (B,): 1.0})
    assert len(p) == 1
    assert p.coefficient([A]) == 0.0


def test_nonzero_constant_survives():
    p = Polynomial({(): 1e-15, (A,): 1.0})
    assert p.constant == 1e-15


def test_add_term_accumulates_and_cancels():
    p = Polynomial({(A,): 2.0})
    q = p.add_term([A], -2.0)
    assert len(q) == 0
    assert len(p) == 1  # value semantics: p untouched
    r = p.add_term([A, B], 3.0)
    assert r.coefficient([A, B]) == 3.0


def test_polynomial_addition():
    p = Polynomial({(A,): 1.0, (B,): 2.0})
    q = Polynomial({(B,): -2.0, (A, B): 5.0})
    s = p + q
    assert s == Polynomial({(A,): 1.0, (A, B): 5.0})


def test_degree_and_variables():
    p = Polynomial({(): 7.0, (A,): 1.0, (A, B, C): 1.0})
    assert p.degree() == 3
    assert p.variables() == frozenset({A, B, C})
    assert Polynomial({(): 3.0}).degree() == 0
    assert Polynomial().degree() == 0


def test_max_abs_coeff_ignores_constant():
    p = Polynomial({(): 100.0, (A,): -3.0, (B,): 2.0})
    assert p.max_abs_coeff() == 3.0
    with pytest.raises(PolynomialError):
        Polynomial({(): 100.0}).max_abs_coeff()


def test_scale_and_normalize():
    p = Polynomial({(A,): -4.0, (B,): 2.0, (): 8.0})
    scaled = p.scale(0.5)
    assert scaled.coefficient([A]) == -2.0
    norm, factor = p.normalize()
    assert factor == 4.0
    assert norm.coefficient([A]) == -1.0
    assert norm.coefficient([B]) == 0.5
    assert norm.constant == 2.0
    assert max(abs(c) for k, c in norm.terms.items() if k) == 1.0


def test_evaluate_both_paths_agree():
    vars = [JoinVar(i, i + 1, 0) for i in range(4)]
    terms = {}
    for size in (1, 2, 3):
        for combo in itertools.combinations(vars, size):
            terms[combo] = float(len(combo))
    terms[()] = 0.25
    p = Polynomial(terms)

    def direct(assignment):
        return sum(c for k, c in p.terms.items() if all(assignment[v] for v in k))

    for bits in itertools.product([0, 1], repeat=4):
        assignment = dict(zip(vars, bits))
        # few active vars forces the subset path, many the scan path; both
        # must match the straightforward sum
        assert p.evaluate(assignment) == pytest.approx(direct(assignment))


def test_evaluate_requires_every_variable():
    p = Polynomial({(A, B): 1.0})
    with pytest.raises(MissingVariableError):
        p.evaluate({A: 1})
    assert p.evaluate({A: 1, B: 0}) == 0.0
    assert Polynomial({(): 2.0}).evaluate({}) == 2.0


def test_dump_format_and_round_trip():
    p = Polynomial({(): 0.5, (A,): -1.25, (A, B): 3.0, (S, W): 2.0})
    text = p.dump()
    lines = text.splitlines()
    assert lines[0] == "# pseudo-boolean polynomial"
    assert lines[1] == "# terms 4 degree 2"
    assert lines[2] == "0.5\t"
    assert lines[3] == "-1.25\tx0-1r0"
    assert Polynomial.parse(text) == p


def test_parse_accepts_bare_constant_and_comments():
    p = Polynomial.parse("# comment\n\n2.5\n1.0\tx0-1r0,x1-2r0\n")
    assert p.constant == 2.5
    assert p.coefficient([A, B]) == 1.0


def test_parse_rejects_malformed_lines():
    with pytest.raises(PolynomialError):
        Polynomial.parse("abc\tx0-1r0\n")
    with pytest.raises(PolynomialError):
        Polynomial.parse("1.0\tnot_a_var\n")
    with pytest.raises(PolynomialError):
        Polynomial.parse("1.0\tx0-1r0\textra\n")


def test_parse_merges_repeated_terms():
    p = Polynomial.parse("1.0\tx0-1r0\n2.0\tx0-1r0\n")
    assert p.coefficient([A]) == 3.0


def test_expand_squared_linear_fixed_example():
    # (1 - a - b)^2 = 1 - a - b + 2ab  on 0/1 values
    p = expand_squared_linear(1.0, [((A,), -1.0), ((B,), -1.0)])
    assert p == Polynomial({(): 1.0, (A,): -1.0, (B,): -1.0, (A, B): 2.0})


def test_expand_squared_linear_idempotence():
    # (2a)^2 = 4a, not 4a^2 as a separate monomial
    p = expand_squared_linear(0.0, [((A,), 2.0)])
    assert p == Polynomial({(A,): 4.0})
    # overlapping products fold onto their union
    q = expand_squared_linear(0.0, [((A, B), 1.0), ((B, C), 1.0)])
    assert q.coefficient([A, B, C]) == 2.0


@given(
    st.lists(
        st.tuples(
            st.lists(st.sampled_from([A, B, C]), min_size=0, max_size=2),
            st.integers(min_value=-3, max_value=3),
        ),
        min_size=0,
        max_size=4,
    ),
    st.integers(min_value=-2, max_value=2),
)
def test_expand_squared_linear_matches_direct_square(linterms, constant):
    p = expand_squared_linear(float(constant), [(vs, float(c)) for vs, c in linterms])
    for bits in itertools.product([0, 1], repeat=3):
        assignment = {A: bits[0], B: bits[1], C: bits[2]}
        inner = constant + sum(
            c * math.prod(assignment[v] for v in vs) for vs, c in linterms
        )
        full = dict(assignment)
        got = sum(
            c * math.prod(full[v] for v in k) if k else c
            for k, c in p.terms.items()
        )
        assert got == pytest.approx(float(inner) ** 2, abs=1e-9)
