"""Random environment generation for campaigns and stress tests."""

from __future__ import annotations

import math
import random
from typing import Optional

from shapely.geometry import Polygon as ShapelyPolygon

from .environment import Environment, validate_environment
from .geom import Point, Polygon


class GenerationError(RuntimeError):
    """Obstacle placement failed within the attempt budget."""


def _square(side: float) -> Polygon:
    return Polygon(
        (Point(0, 0), Point(side, 0), Point(side, side), Point(0, side))
    )


def _random_rectangle(rng: random.Random, max_side: float) -> list[Point]:
    w = rng.uniform(0.8, max_side)
    h = rng.uniform(0.8, max_side)
    return [Point(0, 0), Point(w, 0), Point(w, h), Point(0, h)]


def _random_convex(rng: random.Random, max_side: float) -> list[Point]:
    r = rng.uniform(0.5, max_side / 2.0)
    n = rng.randrange(5, 9)
    angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(n))
    pts = [
        Point(r * (1 + 0.3 * rng.random()) * math.cos(a),
              r * (1 + 0.3 * rng.random()) * math.sin(a))
        for a in angles
    ]
    hull = ShapelyPolygon([(p.x, p.y) for p in pts]).convex_hull
    return [Point(x, y) for x, y in list(hull.exterior.coords)[:-1]]


def generate_environment(
    k: int,
    box: float = 20.0,
    d_min: float = 1.0,
    seed: int = 0,
    name: Optional[str] = None,
    max_attempts: int = 400,
) -> Environment:
    """Square arena with k random well-separated obstacles.

    Obstacles alternate between rectilinear rectangles and convex blobs;
    every pair, and every obstacle and the outer wall, is at least d_min
    apart. Raises GenerationError when the density is infeasible.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    rng = random.Random(seed)
    outer = _square(box)
    if name is None:
        name = f"gen-k{k}-s{seed}"
    if k == 0:
        return Environment(outer=outer, name=name)
    max_side = max(1.0, box / (2.0 * max(2, k)))
    placed: list[ShapelyPolygon] = []
    rings: list[Polygon] = []
    wall = ShapelyPolygon([(p.x, p.y) for p in outer.vertices]).exterior
    attempts = 0
    while len(rings) < k:
        attempts += 1
        if attempts > max_attempts:
            raise GenerationError(
                f"could not place {k} obstacles with d_min={d_min} "
                f"in a {box}x{box} box after {max_attempts} attempts"
            )
        shape = (
            _random_rectangle(rng, max_side)
            if rng.random() < 0.5
            else _random_convex(rng, max_side)
        )
        ox = rng.uniform(0, box)
        oy = rng.uniform(0, box)
        ring = [Point(p.x + ox, p.y + oy) for p in shape]
        sp = ShapelyPolygon([(p.x, p.y) for p in ring])
        if not sp.is_valid or sp.area < 0.25:
            continue
        if wall.distance(sp) < d_min or not sp.within(
            ShapelyPolygon([(p.x, p.y) for p in outer.vertices])
        ):
            continue
        if any(sp.distance(q) < d_min for q in placed):
            continue
        placed.append(sp)
        rings.append(Polygon(tuple(ring)))
    env = Environment(outer=outer, obstacles=tuple(rings), name=name)
    report = validate_environment(env)
    if not report.ok:
        raise GenerationError("; ".join(report.violations))
    return env


def generate_simply_connected(
    seed: int, n_vertices: int = 10, radius: float = 8.0
) -> Environment:
    """Random star-shaped polygon with no obstacles; always simply connected."""
    n = max(3, n_vertices)
    center = Point(radius + 1.0, radius + 1.0)
    report = None
    for attempt in range(32):
        rng = random.Random(seed * 1000 + attempt)
        angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(n))
        # Spread bunched angles so no edge is degenerately short.
        angles = [
            0.7 * a + 0.3 * (2 * math.pi * i / n) for i, a in enumerate(angles)
        ]
        pts = tuple(
            Point(
                center.x + rng.uniform(0.35 * radius, radius) * math.cos(a),
                center.y + rng.uniform(0.35 * radius, radius) * math.sin(a),
            )
            for a in angles
        )
        env = Environment(outer=Polygon(pts), name=f"star-s{seed}")
        report = validate_environment(env)
        if report.ok:
            return env
    raise GenerationError("; ".join(report.violations))
