"""Environment validation, metrics, and serialization round-trips."""

import math

import pytest

from pursuit.environment import (
    EnvironmentParseError,
    compute_metrics,
    load_environment,
    save_environment,
    validate_environment,
)
from pursuit.generator import generate_environment
from pursuit.geom import Point, Polygon
from pursuit.environment import Environment


def test_empty_square_valid(env0):
    assert validate_environment(env0).ok


def test_env1_valid(env1):
    assert validate_environment(env1).ok


def test_touching_obstacles_rejected():
    outer = Polygon((Point(0, 0), Point(10, 0), Point(10, 10), Point(0, 10)))
    a = Polygon((Point(2, 2), Point(4, 2), Point(4, 4), Point(2, 4)))
    b = Polygon((Point(4, 2), Point(6, 2), Point(6, 4), Point(4, 4)))
    report = validate_environment(Environment(outer=outer, obstacles=(a, b)))
    assert not report.ok


def test_env0_metrics(env0):
    m = compute_metrics(env0)
    assert m.k == 0
    assert math.isinf(m.d_min)
    assert abs(m.diameter - math.sqrt(200.0)) <= 1e-6


def test_env1_metrics(env1_metrics):
    assert env1_metrics.k == 1
    assert abs(env1_metrics.d_min - 4.0) <= 1e-9


def test_two_obstacle_d_min():
    outer = Polygon((Point(0, 0), Point(10, 0), Point(10, 10), Point(0, 10)))
    a = Polygon((Point(1, 1), Point(2, 1), Point(2, 2), Point(1, 2)))
    b = Polygon((Point(8, 8), Point(9, 8), Point(9, 9), Point(8, 9)))
    m = compute_metrics(Environment(outer=outer, obstacles=(a, b)))
    assert abs(m.d_min - 1.0) <= 1e-9


def test_minimal_json_parse():
    env = load_environment(
        '{"outer": [[0,0],[10,0],[10,10],[0,10]]}'
    )
    assert len(env.outer.vertices) == 4
    assert env.obstacles == ()


def test_self_intersecting_outer_parses_but_fails_validation():
    env = load_environment(
        '{"outer": [[0,0],[2,2],[2,0],[0,2]]}'
    )
    assert not validate_environment(env).ok


@pytest.mark.parametrize("bad", ["not json", "[]", '{"outer": [[0,0],[1,1]]}'])
def test_parse_errors(bad):
    with pytest.raises(EnvironmentParseError):
        load_environment(bad)


def test_env1_round_trip(env1):
    loaded = load_environment(save_environment(env1))
    assert loaded.outer.vertices == env1.outer.vertices
    assert loaded.obstacles == env1.obstacles
    assert loaded.name == env1.name


@pytest.mark.parametrize("seed", range(20))
def test_generated_round_trip_identity(seed):
    env = generate_environment(k=seed % 4, box=15.0, seed=seed)
    assert validate_environment(env).ok
    loaded = load_environment(save_environment(env))
    assert loaded.outer.vertices == env.outer.vertices
    assert loaded.obstacles == env.obstacles
