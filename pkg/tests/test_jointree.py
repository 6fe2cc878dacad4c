import itertools
import math

import pytest

from hubojoin import (
    GraphError,
    Join,
    Leaf,
    adheres,
    cardinality,
    cost,
    is_left_deep,
    leftdeep_from_order,
    make_instance,
    order_of,
    render,
)
from hubojoin.jointree import JoinTreeError, cost_log, leaves, log_cardinality


def test_leaf_cardinality_and_cost(chain3):
    assert cardinality(Leaf(0), chain3) == 10.0
    assert cost(Leaf(2), chain3) == 0.0


def test_pair_cardinality(chain3):
    t = Join(Leaf(1), Leaf(2))
    assert cardinality(t, chain3) == pytest.approx(60.0)


def test_full_result_cardinality_is_order_independent(chain3):
    values = set()
    for perm in itertools.permutations(range(3)):
        values.add(round(cardinality(leftdeep_from_order(perm), chain3), 6))
    assert values == {300.0}


def test_reference_plan_costs(chain3):
    assert cost(leftdeep_from_order([1, 2, 0]), chain3) == pytest.approx(360.0)
    assert cost(leftdeep_from_order([0, 1, 2]), chain3) == pytest.approx(400.0)


def test_cross_product_uses_selectivity_one(chain3):
    assert cardinality(Join(Leaf(0), Leaf(2)), chain3) == pytest.approx(300.0)


def test_bushy_tree_cardinality_matches_left_deep():
    g = make_instance("chain", 4, seed=11)
    bushy = Join(Join(Leaf(0), Leaf(1)), Join(Leaf(2), Leaf(3)))
    flat = leftdeep_from_order([0, 1, 2, 3])
    assert cardinality(bushy, g) == pytest.approx(cardinality(flat, g))


def test_unknown_relation_raises(chain3):
    with pytest.raises(GraphError):
        cost(Join(Leaf(0), Leaf(7)), chain3)


def test_adheres(chain3):
    assert adheres(leftdeep_from_order([0, 1, 2]), chain3)
    assert adheres(leftdeep_from_order([1, 2, 0]), chain3)
    assert not adheres(leftdeep_from_order([0, 2, 1]), chain3)  # 0-2 not an edge
    assert not adheres(Join(Leaf(0), Leaf(1)), chain3)  # relation 2 missing


def test_left_deep_shape_checks():
    assert is_left_deep(leftdeep_from_order([3, 1, 0, 2]))
    bushy = Join(Join(Leaf(0), Leaf(1)), Join(Leaf(2), Leaf(3)))
    assert not is_left_deep(bushy)
    with pytest.raises(JoinTreeError):
        order_of(bushy)


def test_leftdeep_from_order():
    t = leftdeep_from_order([0, 1, 2, 3])
    assert render(t) == "[[[0,1],2],3]"
    assert order_of(t) == (0, 1, 2, 3)
    assert leaves(t) == (0, 1, 2, 3)
    t2 = leftdeep_from_order([1, 0])
    assert t2 == Join(Leaf(1), Leaf(0))
    with pytest.raises(JoinTreeError):
        leftdeep_from_order([0, 0, 1])
    with pytest.raises(JoinTreeError):
        leftdeep_from_order([4])


def test_cost_at_least_final_cardinality():
    for shape in ("chain", "star", "cycle", "clique"):
        g = make_instance(shape, 5, seed=2)
        t = leftdeep_from_order([0, 1, 2, 3, 4])
        assert cost(t, g) >= cardinality(t, g)


def test_adherent_prefixes_stay_connected():
    from conftest import adherent_orders

    for shape in ("chain", "star", "cycle", "tree"):
        g = make_instance(shape, 6, seed=5)
        for order in adherent_orders(g):
            for k in range(2, len(order) + 1):
                members = set(order[:k])
                # BFS inside the prefix
                seen = {order[0]}
                stack = [order[0]]
                while stack:
                    i = stack.pop()
                    for j in g.neighbors(i):
                        if j in members and j not in seen:
                            seen.add(j)
                            stack.append(j)
                assert seen == members


def test_log_domain_agrees_with_plain():
    g = make_instance("star", 7, seed=9)
    t = leftdeep_from_order([0, 1, 2, 3, 4, 5, 6])
    assert math.log(cardinality(t, g)) == pytest.approx(
        log_cardinality(t, g), rel=1e-9
    )
    assert math.log(cost(t, g)) == pytest.approx(cost_log(t, g), rel=1e-9)
    with pytest.raises(JoinTreeError):
        cost_log(Leaf(0), g)
