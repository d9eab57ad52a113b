"""Game arena: outer polygon, obstacles, validation, metrics, and file I/O."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

from shapely.geometry import Polygon as ShapelyPolygon

from .geom import (
    Containment,
    Point,
    Polygon,
    point_in_polygon,
    segment_segment_distance,
)
from .tolerances import Tolerances
from .visibility import VisibilityGraph


@dataclass(frozen=True)
class Environment:
    """Outer polygon with disjoint polygonal obstacles."""

    outer: Polygon
    obstacles: tuple[Polygon, ...] = ()
    name: str = "env"

    def free_space(self) -> ShapelyPolygon:
        shell = [(p.x, p.y) for p in self.outer.vertices]
        holes = [[(p.x, p.y) for p in ob.vertices] for ob in self.obstacles]
        return ShapelyPolygon(shell, holes)

    def bounding_scale(self) -> float:
        xs = [p.x for p in self.outer.vertices]
        ys = [p.y for p in self.outer.vertices]
        return math.hypot(max(xs) - min(xs), max(ys) - min(ys))

    def tolerances(self) -> Tolerances:
        return Tolerances(self.bounding_scale())


@dataclass(frozen=True)
class EnvironmentMetrics:
    d_min: float
    diameter: float
    k: int


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


class EnvironmentError(ValueError):
    pass


def validate_environment(env: Environment) -> ValidationReport:
    """Check simplicity, containment, separation, and connectivity.

    Violations are reported as data; nothing raises.
    """
    problems: list[str] = []
    tol = env.tolerances().geom
    if not env.outer.is_simple(tol):
        problems.append("outer polygon is self-intersecting")
    for i, ob in enumerate(env.obstacles):
        if not ob.is_simple(tol):
            problems.append(f"obstacle {i} is self-intersecting")
    # Strict containment of obstacles inside the outer polygon.
    for i, ob in enumerate(env.obstacles):
        for v in ob.vertices:
            if point_in_polygon(v, env.outer, tol) != Containment.INSIDE:
                problems.append(f"obstacle {i} vertex {tuple(v)} not strictly inside outer")
                break
    # Positive pairwise separation between all distinct boundary components.
    components = [env.outer, *env.obstacles]
    labels = ["outer"] + [f"obstacle {i}" for i in range(len(env.obstacles))]
    for i in range(len(components)):
        for j in range(i + 1, len(components)):
            if i == 0:
                continue  # containment check above covers outer vs obstacle overlap
            d = _component_distance(components[i], components[j])
            if d <= tol:
                problems.append(f"zero separation between {labels[i]} and {labels[j]}")
    if not problems:
        free = env.free_space()
        if not free.is_valid or free.is_empty:
            problems.append("free space is degenerate")
        else:
            graph = VisibilityGraph(free)
            if not _connected(graph):
                problems.append("free space is not path-connected")
    return ValidationReport(tuple(problems))


def _component_distance(a: Polygon, b: Polygon) -> float:
    return min(
        segment_segment_distance(e1[0], e1[1], e2[0], e2[1])
        for e1 in a.edges()
        for e2 in b.edges()
    )


def _connected(graph: VisibilityGraph) -> bool:
    n = len(graph.vertices)
    if n == 0:
        return False
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v, _ in graph.adjacency[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == n


def compute_metrics(env: Environment, max_samples: int = 256) -> EnvironmentMetrics:
    """Minimum boundary separation and sampled geodesic diameter.

    d_min is the exact minimum over boundary segment pairs from distinct
    components (+inf sentinel without obstacles). The diameter is the max
    geodesic distance over polygon vertices plus boundary samples at
    spacing d_min/2 (capped at ``max_samples`` points), an approximation
    consumed only by capture-time budgets.
    """
    report = validate_environment(env)
    if not report.ok:
        raise EnvironmentError("; ".join(report.violations))
    components = [env.outer, *env.obstacles]
    if env.obstacles:
        d_min = min(
            _component_distance(components[i], components[j])
            for i in range(len(components))
            for j in range(i + 1, len(components))
        )
    else:
        d_min = math.inf
    graph = VisibilityGraph(env.free_space())
    points: list[Point] = list(graph.vertices)
    if math.isfinite(d_min):
        spacing = d_min / 2.0
        perimeter = sum(c.perimeter() for c in components)
        if perimeter / spacing > max_samples:
            spacing = perimeter / max_samples
        for comp in components:
            closed = comp.closed_polyline()
            s = spacing
            while s < closed.length:
                points.append(closed.point_at(s))
                s += spacing
    diameter = 0.0
    for p in points:
        dist, _ = graph.source_tree(p)
        for q in points:
            best = min(
                (dist[i] + w for i, w in graph.visible_vertices(q) if math.isfinite(dist[i])),
                default=math.inf,
            )
            if graph.visible(p, q):
                best = min(best, p.dist(q))
            if math.isfinite(best):
                diameter = max(diameter, best)
    return EnvironmentMetrics(d_min=d_min, diameter=diameter, k=len(env.obstacles))


# -- serialization -------------------------------------------------------


class EnvironmentParseError(ValueError):
    pass


def load_environment(text: str) -> Environment:
    """Parse the JSON environment format.

    Validation is separate: geometric violations do not fail the parse.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise EnvironmentParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise EnvironmentParseError("top-level value must be an object")
    name = data.get("name", "env")
    if not isinstance(name, str):
        raise EnvironmentParseError("field 'name' must be a string")
    outer = _parse_ring(data.get("outer"), "outer")
    raw_obstacles = data.get("obstacles", [])
    if not isinstance(raw_obstacles, list):
        raise EnvironmentParseError("field 'obstacles' must be a list")
    obstacles = tuple(
        _parse_ring(ring, f"obstacles[{i}]") for i, ring in enumerate(raw_obstacles)
    )
    return Environment(outer=outer, obstacles=obstacles, name=name)


def _parse_ring(raw, label: str) -> Polygon:
    if not isinstance(raw, list) or len(raw) < 3:
        raise EnvironmentParseError(f"{label}: expected a list of >=3 [x,y] pairs")
    pts = []
    for i, item in enumerate(raw):
        if (
            not isinstance(item, list)
            or len(item) != 2
            or not all(isinstance(c, (int, float)) for c in item)
        ):
            raise EnvironmentParseError(f"{label}[{i}]: expected [x,y] numbers")
        pts.append(Point(float(item[0]), float(item[1])))
    try:
        return Polygon(tuple(pts))
    except ValueError as exc:
        raise EnvironmentParseError(f"{label}: {exc}") from exc


def save_environment(env: Environment) -> str:
    """Serialize; coordinates survive a load round-trip bit for bit."""
    data = {
        "name": env.name,
        "outer": [[p.x, p.y] for p in env.outer.vertices],
        "obstacles": [[[p.x, p.y] for p in ob.vertices] for ob in env.obstacles],
    }
    return json.dumps(data, indent=2)
