"""Shared fixtures and helpers for the test suite."""

import math

import pytest
from hypothesis import HealthCheck, settings

from hubojoin import QueryGraph, Shape, derive_seed, make_instance

settings.register_profile(
    "suite",
    derandomize=True,
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("suite")


def rel_close(a: float, b: float, tol: float = 1e-9) -> bool:
    return math.isclose(a, b, rel_tol=tol, abs_tol=0.0)


@pytest.fixture
def chain3() -> QueryGraph:
    """3-relation chain with hand-checkable statistics.

    Reference numbers used throughout: joining (0,1) costs 100, (1,2) costs
    60, the full result has cardinality 300, the best plan [1,2,0] costs 360
    and the other plan [0,1,2] costs 400.
    """
    return QueryGraph(
        shape=Shape.CHAIN,
        cardinalities=(10.0, 20.0, 30.0),
        edges=((0, 1, 0.5), (1, 2, 0.1)),
    )


def grid(shapes, sizes, count=20, base_seed=0, card_range=(10, 50)):
    """Seeded instance grid, one graph per (shape, size, index)."""
    for shape in shapes:
        for n in sizes:
            for idx in range(count):
                seed = derive_seed(base_seed, shape, n, idx)
                yield shape, n, idx, make_instance(shape, n, seed, card_range)


def adherent_orders(g: QueryGraph):
    """Every cross-product-free left-deep order, first pair ascending.

    [a, b, ...] and [b, a, ...] encode the same assignment and the same
    cost, so only the ascending variant of the leading pair is emitted.
    """
    n = g.n_relations
    out = []

    def extend(order, members):
        if len(order) == n:
            out.append(tuple(order))
            return
        for t in range(n):
            if t in members:
                continue
            if any(g.has_edge(min(t, m), max(t, m)) for m in members):
                order.append(t)
                members.add(t)
                extend(order, members)
                order.pop()
                members.remove(t)

    for u, v, _f in g.edges:
        extend([u, v], {u, v})
    return out
