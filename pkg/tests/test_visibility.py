"""Visibility graph cross-checked against brute-force and grid oracles."""

import math

import pytest

from pursuit.environment import compute_metrics
from pursuit.generator import generate_environment
from pursuit.geom import Point
from pursuit.visibility import VisibilityGraph

from oracles import brute_visibility_pairs, free_polygon, grid_distance


def _graph(env):
    return VisibilityGraph(env.free_space())


def test_empty_square_complete_on_corners(env0):
    g = _graph(env0)
    assert len(g.vertices) == 4
    for i in range(4):
        assert len(g.adjacency[i]) == 3


def test_env1_blocked_diagonal(env1):
    g = _graph(env1)
    assert not g.visible(Point(0, 0), Point(10, 10))
    assert g.visible(Point(0, 0), Point(4, 4))


def test_env1_edges_match_brute_force(env1):
    g = _graph(env1)
    region = free_polygon(env1)
    tol = env1.tolerances().geom
    brute = brute_visibility_pairs(region, list(g.vertices), tol)
    mine = set()
    for i, nbrs in enumerate(g.adjacency):
        for j, _w in nbrs:
            if i < j:
                mine.add((i, j))
    assert mine == brute


@pytest.mark.parametrize("seed", range(5))
def test_generated_edges_match_brute_force(seed):
    env = generate_environment(k=2 + seed % 3, box=12.0, seed=seed)
    g = _graph(env)
    region = free_polygon(env)
    tol = env.tolerances().geom
    brute = brute_visibility_pairs(region, list(g.vertices), tol)
    mine = {
        (i, j) for i, nbrs in enumerate(g.adjacency) for j, _w in nbrs if i < j
    }
    assert mine == brute


def test_env0_straight_path(env0):
    g = _graph(env0)
    res = g.shortest_path(Point(0, 5), Point(10, 5))
    assert abs(res.length - 10.0) <= 1e-9
    assert len(res.polyline.vertices) == 2


def test_env1_around_obstacle(env1):
    g = _graph(env1)
    res = g.shortest_path(Point(0, 5), Point(10, 5))
    assert abs(res.length - (2.0 + 2.0 * math.sqrt(17.0))) <= 1e-9
    # Tie-break picks the below route through (4,4), (6,4).
    mid = [tuple(v) for v in res.polyline.vertices[1:-1]]
    assert mid == [(4.0, 4.0), (6.0, 4.0)]


def test_env1_corner_to_corner(env1):
    g = _graph(env1)
    res = g.shortest_path(Point(0, 0), Point(10, 10))
    assert abs(res.length - 2.0 * math.sqrt(52.0)) <= 1e-9
    assert [tuple(v) for v in res.polyline.vertices[1:-1]] == [(6.0, 4.0)]


@pytest.mark.parametrize("seed", range(3))
def test_shortest_path_matches_grid_oracle(seed):
    env = generate_environment(k=2, box=10.0, seed=seed)
    m = compute_metrics(env)
    g = _graph(env)
    region = free_polygon(env)
    pitch = min(m.d_min, 2.0) / 4.0
    import random

    rng = random.Random(seed)
    checked = 0
    while checked < 3:
        a = Point(rng.uniform(0, 10), rng.uniform(0, 10))
        b = Point(rng.uniform(0, 10), rng.uniform(0, 10))
        if not (g.contains(a) and g.contains(b)):
            continue
        exact = g.shortest_path(a, b).length
        approx = grid_distance(region, a, b, pitch)
        if approx is None or exact < pitch * 4:
            continue
        assert exact <= approx * 1.001 + 4 * pitch
        assert approx <= exact * 1.02 + 4 * pitch
        checked += 1
