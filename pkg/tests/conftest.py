"""Shared fixtures: the two reference environments and generated corpora."""

from __future__ import annotations

import pytest

from pursuit.environment import Environment, compute_metrics
from pursuit.geom import Point, Polygon


def square(side: float = 10.0) -> Polygon:
    return Polygon(
        (Point(0, 0), Point(side, 0), Point(side, side), Point(0, side))
    )


@pytest.fixture(scope="session")
def env0() -> Environment:
    """Empty 10x10 square."""
    return Environment(outer=square(), name="env0")


@pytest.fixture(scope="session")
def env1() -> Environment:
    """10x10 square with one centered 2x2 block."""
    block = Polygon((Point(4, 4), Point(6, 4), Point(6, 6), Point(4, 6)))
    return Environment(outer=square(), obstacles=(block,), name="env1")


@pytest.fixture(scope="session")
def env1_metrics(env1):
    return compute_metrics(env1)


@pytest.fixture(scope="session")
def env2() -> Environment:
    """20x20 square with two separated blocks; supports third-path rounds."""
    outer = square(20.0)
    o1 = Polygon((Point(4, 4), Point(7, 4), Point(7, 7), Point(4, 7)))
    o2 = Polygon((Point(12, 11), Point(16, 11), Point(16, 15), Point(12, 15)))
    return Environment(outer=outer, obstacles=(o1, o2), name="env2")
