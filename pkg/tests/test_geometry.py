import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ampsim.geometry import Link, Route, Vec2, distance, is_connected

coords = st.floats(min_value=-1e4, max_value=1e4, allow_nan=False)
points = st.builds(Vec2, coords, coords)


def test_distance_345():
    assert distance(Vec2(0, 0), Vec2(3, 4)) == 5.0


def test_distance_identity():
    assert distance(Vec2(7, 2), Vec2(7, 2)) == 0.0


def test_distance_collinear():
    assert distance(Vec2(100, 0), Vec2(350, 0)) == 250.0


def test_connected_at_exact_range():
    assert is_connected(Vec2(0, 0), Vec2(0, 250), 250.0)


def test_disconnected_just_beyond_range():
    assert not is_connected(Vec2(0, 0), Vec2(0, 250.01), 250.0)


def test_connected_zero_distance():
    assert is_connected(Vec2(0, 0), Vec2(0, 0), 250.0)


@pytest.mark.parametrize("r", [0.0, -1.0])
def test_connectivity_rejects_nonpositive_range(r):
    with pytest.raises(ValueError):
        is_connected(Vec2(0, 0), Vec2(1, 1), r)


@given(points, points)
def test_distance_symmetric_and_nonnegative(p, q):
    assert distance(p, q) >= 0.0
    assert distance(p, q) == distance(q, p)


@given(points, points, points)
def test_triangle_inequality(p, q, s):
    assert distance(p, s) <= distance(p, q) + distance(q, s) + 1e-9


@given(points, points, st.floats(min_value=1e-3, max_value=1e4))
def test_connectivity_symmetric(p, q, r):
    assert is_connected(p, q, r) == is_connected(q, p, r)


def test_link_canonical_order():
    assert Link.of(5, 2) == Link.of(2, 5) == Link(2, 5)
    with pytest.raises(ValueError):
        Link.of(3, 3)


def test_route_invariants():
    r = Route((0, 4, 2, 7))
    assert r.hop_count == 3
    assert r.source == 0 and r.destination == 7
    assert r.links() == [Link(0, 4), Link(2, 4), Link(2, 7)]
    with pytest.raises(ValueError):
        Route((1,))
    with pytest.raises(ValueError):
        Route((1, 2, 1))
