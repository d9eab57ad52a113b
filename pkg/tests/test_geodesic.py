"""Geodesic paths, alternate homotopy classes, split points, projection."""

import math
import random

import pytest

from pursuit.geodesic import (
    PathError,
    find_split_point,
    guardable_certificate,
    is_minimal_path,
    make_path,
    path_projection,
    projection_arclength,
    second_shortest_path,
    shortest_path,
    third_path,
)
from pursuit.geom import Point, Polyline
from pursuit.homotopy import RaySystem
from pursuit.territory import initial_territory

from oracles import enumerate_class_lengths


def _setup(env):
    t = initial_territory(env)
    rays = RaySystem(env.outer, dict(enumerate(env.obstacles)))
    return t, rays


BELOW_LEN = 2.0 + 2.0 * math.sqrt(17.0)


class TestShortest:
    def test_env1_below_route(self, env1):
        t, rays = _setup(env1)
        p = shortest_path(t, rays, Point(0, 5), Point(10, 5))
        assert abs(p.length - BELOW_LEN) <= 1e-9
        assert p.signature == ()
        assert p.touched_obstacles == (0,)

    def test_untouched_path(self, env1):
        t, rays = _setup(env1)
        p = shortest_path(t, rays, Point(0, 0), Point(10, 0))
        assert abs(p.length - 10.0) <= 1e-9
        assert p.touched_obstacles == ()


class TestSecondShortest:
    def test_env1_other_class(self, env1):
        t, rays = _setup(env1)
        p1 = shortest_path(t, rays, Point(0, 5), Point(10, 5))
        p2 = second_shortest_path(t, rays, p1, touch=0)
        assert p2.signature != p1.signature
        assert abs(p2.length - BELOW_LEN) <= 1e-9
        assert 0 in p2.touched_obstacles

    def test_matches_class_enumeration(self, env1):
        """The snip construction and an independent lifted enumeration must
        agree on the second class minimum."""
        t, rays = _setup(env1)
        p1 = shortest_path(t, rays, Point(0, 5), Point(10, 5))
        p2 = second_shortest_path(t, rays, p1, touch=0)
        oracle = enumerate_class_lengths(env1, Point(0, 5), Point(10, 5))
        assert abs(p2.length - oracle[1]) <= 1e-6

    def test_untouched_obstacle_rejected(self, env1):
        t, rays = _setup(env1)
        p = shortest_path(t, rays, Point(0, 0), Point(10, 0))
        with pytest.raises(PathError):
            second_shortest_path(t, rays, p, touch=0)


class TestThirdPath:
    def test_env2_between_obstacles(self, env2):
        t, rays = _setup(env2)
        lo = make_path(
            t, rays, Polyline((Point(0, 0), Point(7, 4), Point(16, 11), Point(20, 20)))
        )
        hi = make_path(
            t, rays, Polyline((Point(0, 0), Point(4, 7), Point(12, 15), Point(20, 20)))
        )
        assert 0 in lo.touched_obstacles and 1 in hi.touched_obstacles
        p3 = third_path(t, rays, lo, hi, touch1=0, touch2=1)
        assert p3.signature not in (lo.signature, hi.signature)
        # The middle route separates obstacle 0 from lo and 1 from hi.
        oracle = enumerate_class_lengths(env2, Point(0, 0), Point(20, 20))
        assert any(abs(p3.length - v) <= 1e-6 for v in oracle)


class TestGuardable:
    def test_shortest_pair_guardable(self, env1):
        t, rays = _setup(env1)
        p1 = shortest_path(t, rays, Point(0, 5), Point(10, 5))
        p2 = second_shortest_path(t, rays, p1, touch=0)
        assert guardable_certificate(t, rays, p1, p2)

    def test_long_detour_not_guardable(self, env1):
        """A slack second path admits an unseen shorter class and fails."""
        t, rays = _setup(env1)
        p1 = shortest_path(t, rays, Point(0, 5), Point(10, 5))
        detour = make_path(
            t,
            rays,
            Polyline(
                (Point(0, 5), Point(0, 9.5), Point(9.5, 9.5), Point(10, 5))
            ),
        )
        assert detour.signature != p1.signature
        assert not guardable_certificate(t, rays, p1, detour)


class TestSplitPoint:
    def test_env1_corner_split(self, env1):
        """From (0,0) the far corner splits the boundary: the two class
        minima both realize the geodesic distance 2*sqrt(52)."""
        t, rays = _setup(env1)
        delta = Polyline((Point(10, 0), Point(10, 10), Point(0, 10)))
        x, pa, pb = find_split_point(t, rays, Point(0, 0), delta)
        assert x.dist(Point(10, 10)) <= 0.02
        target = 2.0 * math.sqrt(52.0)
        assert abs(pa.length - target) <= 1e-6 * 20.0
        assert abs(pb.length - target) <= 1e-6 * 20.0
        assert pa.signature != pb.signature
        # Each route touches the obstacle it passes.
        assert 0 in pa.touched_obstacles
        assert 0 in pb.touched_obstacles

    def test_split_matches_oracle(self, env1):
        t, rays = _setup(env1)
        delta = Polyline((Point(10, 0), Point(10, 10), Point(0, 10)))
        x, pa, pb = find_split_point(t, rays, Point(0, 0), delta)
        oracle = enumerate_class_lengths(env1, Point(0, 0), x)
        assert abs(pa.length - oracle[0]) <= 1e-6
        assert abs(pb.length - oracle[1]) <= 1e-6


class TestProjection:
    def test_clamps_at_end(self, env1):
        t, rays = _setup(env1)
        pi = shortest_path(t, rays, Point(0, 5), Point(10, 5))
        far = Point(10, 9)
        assert path_projection(t, pi, far) == pi.end
        assert projection_arclength(t, pi, far) == pi.length

    def test_start_projects_to_start(self, env1):
        t, rays = _setup(env1)
        pi = shortest_path(t, rays, Point(0, 5), Point(10, 5))
        assert projection_arclength(t, pi, Point(0, 5)) <= 1e-9

    def test_non_expansive_sampled(self, env1):
        t, rays = _setup(env1)
        pi = shortest_path(t, rays, Point(0, 5), Point(10, 5))
        rng = random.Random(7)
        pairs = 0
        while pairs < 20:
            z1 = Point(rng.uniform(0, 10), rng.uniform(0, 10))
            z2 = Point(rng.uniform(0, 10), rng.uniform(0, 10))
            if not (t.contains(z1) and t.contains(z2)):
                continue
            ds = abs(
                projection_arclength(t, pi, z1) - projection_arclength(t, pi, z2)
            )
            dz = t.graph.distance_via_tree(z1, z2)
            assert ds <= dz + 1e-6
            pairs += 1


class TestMinimality:
    def test_shortest_is_minimal(self, env1):
        t, rays = _setup(env1)
        pi = shortest_path(t, rays, Point(0, 5), Point(10, 5))
        ok, witness = is_minimal_path(t, pi)
        assert ok and witness is None

    def test_detour_is_not_minimal(self, env1):
        t, rays = _setup(env1)
        detour = make_path(
            t, rays, Polyline((Point(0, 5), Point(5, 0.5), Point(10, 5)))
        )
        ok, witness = is_minimal_path(t, detour)
        assert not ok
        y1, y2, z = witness
        d = t.graph.distance_via_tree(z, y1) + t.graph.distance_via_tree(z, y2)
        s1 = detour.polyline.project_arclength(y1)
        s2 = detour.polyline.project_arclength(y2)
        assert abs(s2 - s1) > d
