"""Territory cutting, boundary tagging, and region typing."""

import math

import pytest

from pursuit.geom import Point, Polyline
from pursuit.territory import (
    REGION_0,
    REGION_1,
    REGION_1P,
    REGION_2,
    REGION_INIT,
    AmbiguousSideError,
    cut_territory,
    initial_territory,
    sample_free_point,
)


DIAG = Polyline((Point(0, 0), Point(6, 4), Point(10, 10)))
BELOW = Polyline((Point(0, 5), Point(4, 4), Point(6, 4), Point(10, 5)))


def test_initial_territory(env1):
    t = initial_territory(env1)
    assert t.region_type == REGION_INIT
    assert set(t.obstacles) == {0}
    assert t.hole_ids == frozenset({0})
    assert t.contains(Point(1, 1))
    assert not t.contains(Point(5, 5))


def test_initial_d_min(env1):
    t = initial_territory(env1)
    assert abs(t.d_min() - 4.0) <= 1e-9


def test_cut_below_path_evader_above(env1):
    """Cut along the below route: the region above keeps the obstacle as a
    boundary lobe and types as 1 or 1-prime."""
    t = initial_territory(env1)
    new_t, removed = cut_territory(t, BELOW, Point(5, 8), {"P1": BELOW}, "P1")
    assert removed == []
    assert set(new_t.obstacles) == {0}
    # The obstacle ring now sits on the boundary: no longer a hole.
    assert new_t.hole_ids == frozenset()
    assert new_t.region_type in (REGION_1, REGION_1P)
    assert new_t.active_guards() == ["P1"]
    assert new_t.contains(Point(5, 8))
    assert not new_t.contains(Point(5, 1))


def test_cut_below_path_evader_below(env1):
    """The pocket side between the path and the wall contains no obstacle."""
    t = initial_territory(env1)
    new_t, removed = cut_territory(t, BELOW, Point(5, 1), {"P1": BELOW}, "P1")
    assert removed == [0]
    assert new_t.obstacles == {}
    assert new_t.region_type == REGION_0
    assert new_t.contains(Point(5, 1))


def test_cut_diagonal(env1):
    t = initial_territory(env1)
    new_t, removed = cut_territory(t, DIAG, Point(2, 8), {"P1": DIAG}, "P1")
    assert removed == []
    assert set(new_t.obstacles) == {0}
    assert new_t.region_type in (REGION_1, REGION_1P)


def test_cut_evader_on_path_ambiguous(env1):
    t = initial_territory(env1)
    with pytest.raises(AmbiguousSideError):
        cut_territory(t, DIAG, Point(6, 4), {"P1": DIAG}, "P1")


def test_cut_empty_square(env0):
    t = initial_territory(env0)
    diag = Polyline((Point(0, 0), Point(10, 10)))
    new_t, removed = cut_territory(t, diag, Point(2, 8), {"P1": diag}, "P1")
    assert removed == []
    assert new_t.region_type == REGION_0
    assert new_t.active_guards() == ["P1"]
    area = new_t.polygon.area
    assert abs(area - 50.0) <= 0.01


def test_second_cut_releases_first_guard(env1):
    """After the split round the territory has no obstacles and only the
    newest guard remains on its boundary."""
    t = initial_territory(env1)
    t1, _ = cut_territory(t, DIAG, Point(2, 8), {"P1": DIAG}, "P1")
    # The split path for the upper region: the over-the-top route.
    over = Polyline((Point(10, 10), Point(4, 6), Point(0, 0)))
    t2, removed = cut_territory(
        t1, over, Point(1, 5), {"P2": over, "P1": DIAG}, "P2"
    )
    assert removed == [0]
    assert t2.region_type == REGION_0
    assert t2.obstacles == {}


def test_boundary_loop_closed(env1):
    t = initial_territory(env1)
    loop = t.boundary_loop()
    assert loop.start.dist(loop.end) <= 1e-9
    assert abs(loop.length - 40.0) <= 1e-9


def test_sample_free_point(env1):
    import random

    t = initial_territory(env1)
    rng = random.Random(0)
    for _ in range(20):
        p = sample_free_point(t, rng, margin=0.05)
        assert t.contains(p)


def test_stacked_obstacles_type2(env2):
    """Guarding above both obstacles and below both yields a type 2 region
    when the evader sits between the two paths."""
    t = initial_territory(env2)
    lo = Polyline((Point(0, 0), Point(7, 4), Point(16, 11), Point(20, 20)))
    t1, _ = cut_territory(t, lo, Point(4, 12), {"P1": lo}, "P1")
    hi = Polyline((Point(0, 0), Point(4, 7), Point(12, 15), Point(20, 20)))
    t2, removed = cut_territory(t1, hi, Point(8, 9), {"P2": hi, "P1": lo}, "P2")
    assert t2.region_type == REGION_2
    assert set(t2.active_guards()) == {"P1", "P2"}
    assert removed == []
    assert set(t2.obstacles) == {0, 1}
