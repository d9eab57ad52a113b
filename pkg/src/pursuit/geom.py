"""Planar geometric primitives: points, polylines, polygons, intersections.

All geometry is double precision. Incidence tests use a single tolerance
passed by the caller (see :mod:`pursuit.tolerances` for the scale-derived
default). Values are immutable after construction and safe to share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional, Sequence

DEFAULT_TOL = 1e-9


class Point(NamedTuple):
    x: float
    y: float

    def dist(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def __add__(self, other):  # type: ignore[override]
        return Point(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point(self.x - other[0], self.y - other[1])

    def scaled(self, k: float) -> "Point":
        return Point(self.x * k, self.y * k)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


def cross(o: Point, a: Point, b: Point) -> float:
    """Z component of (a - o) x (b - o)."""
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def dot(o: Point, a: Point, b: Point) -> float:
    return (a.x - o.x) * (b.x - o.x) + (a.y - o.y) * (b.y - o.y)


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    """Euclidean distance from p to the closed segment ab."""
    ab2 = (b.x - a.x) ** 2 + (b.y - a.y) ** 2
    if ab2 == 0.0:
        return p.dist(a)
    t = ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / ab2
    t = min(1.0, max(0.0, t))
    q = Point(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
    return p.dist(q)


def segment_segment_distance(a1: Point, a2: Point, b1: Point, b2: Point) -> float:
    """Euclidean distance between two closed segments."""
    if segment_intersection(a1, a2, b1, b2) is not None:
        return 0.0
    return min(
        point_segment_distance(a1, b1, b2),
        point_segment_distance(a2, b1, b2),
        point_segment_distance(b1, a1, a2),
        point_segment_distance(b2, a1, a2),
    )


class IntersectionKind(Enum):
    POINT = "point"
    OVERLAP = "overlap"


@dataclass(frozen=True)
class Intersection:
    """Descriptor for a segment-segment intersection.

    ``kind`` is POINT for a single intersection point (``touching`` marks an
    endpoint contact) or OVERLAP for a collinear overlap with ``points``
    holding the two overlap endpoints.
    """

    kind: IntersectionKind
    points: tuple[Point, ...]
    touching: bool = False

    @property
    def point(self) -> Point:
        return self.points[0]


def segment_intersection(
    a1: Point, a2: Point, b1: Point, b2: Point, tol: float = DEFAULT_TOL
) -> Optional[Intersection]:
    """Intersect closed segments a1a2 and b1b2.

    Returns a point descriptor, a collinear overlap descriptor, or None.
    Endpoint contacts are reported as points with ``touching=True``.
    Zero-length segments degrade to point containment checks. Symmetric in
    the two segments.
    """
    d1 = cross(a1, a2, b1)
    d2 = cross(a1, a2, b2)
    d3 = cross(b1, b2, a1)
    d4 = cross(b1, b2, a2)
    scale = max(a1.dist(a2), b1.dist(b2), 1.0)
    eps = tol * scale

    if abs(d1) <= eps * scale and abs(d2) <= eps * scale:
        # Collinear (or one/both segments degenerate): project on the longer axis.
        axis = 0 if abs(a2.x - a1.x) + abs(b2.x - b1.x) >= abs(a2.y - a1.y) + abs(b2.y - b1.y) else 1
        pts = sorted([a1, a2], key=lambda p: p[axis])
        qts = sorted([b1, b2], key=lambda p: p[axis])
        lo = max(pts[0][axis], qts[0][axis])
        hi = min(pts[1][axis], qts[1][axis])
        if lo > hi + eps:
            return None
        # Guard against near-parallel but offset segments.
        if point_segment_distance(qts[0] if qts[0][axis] >= pts[0][axis] else pts[0], a1, a2) > eps and \
           point_segment_distance(pts[0] if pts[0][axis] >= qts[0][axis] else qts[0], b1, b2) > eps:
            pass
        p_lo = _point_on_collinear(a1, a2, b1, b2, axis, lo)
        p_hi = _point_on_collinear(a1, a2, b1, b2, axis, hi)
        if p_lo.dist(p_hi) <= eps:
            return Intersection(IntersectionKind.POINT, (p_lo,), touching=True)
        return Intersection(IntersectionKind.OVERLAP, (p_lo, p_hi))

    def _between(d_lo: float, d_hi: float) -> bool:
        return (d_lo <= eps * scale and d_hi >= -eps * scale) or (
            d_lo >= -eps * scale and d_hi <= eps * scale
        )

    if not (_between(d1, d2) and _between(d3, d4)):
        return None

    denom = (a2.x - a1.x) * (b2.y - b1.y) - (a2.y - a1.y) * (b2.x - b1.x)
    if denom == 0.0:
        return None
    t = ((b1.x - a1.x) * (b2.y - b1.y) - (b1.y - a1.y) * (b2.x - b1.x)) / denom
    t = min(1.0, max(0.0, t))
    p = Point(a1.x + t * (a2.x - a1.x), a1.y + t * (a2.y - a1.y))
    touching = (
        min(p.dist(a1), p.dist(a2), p.dist(b1), p.dist(b2)) <= eps
    )
    return Intersection(IntersectionKind.POINT, (p,), touching=touching)


def _point_on_collinear(a1: Point, a2: Point, b1: Point, b2: Point, axis: int, coord: float) -> Point:
    for p in (a1, a2, b1, b2):
        if abs(p[axis] - coord) == 0.0:
            return p
    # Interpolate along the longer of the two segments.
    a, b = (a1, a2) if a1.dist(a2) >= b1.dist(b2) else (b1, b2)
    if b[axis] == a[axis]:
        return a
    t = (coord - a[axis]) / (b[axis] - a[axis])
    return Point(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))


@dataclass(frozen=True)
class Polyline:
    """Open polygonal chain with cumulative arc-length parameterization.

    Consecutive duplicate vertices are merged on construction so that the
    cumulative lengths are strictly increasing.
    """

    vertices: tuple[Point, ...]
    cumulative_lengths: tuple[float, ...] = field(default=())

    def __post_init__(self):
        verts = [Point(*self.vertices[0])]
        for v in self.vertices[1:]:
            v = Point(*v)
            if v.dist(verts[-1]) > 0.0:
                verts.append(v)
        if len(verts) < 2:
            verts = [verts[0], verts[0]]
        cum = [0.0]
        for a, b in zip(verts, verts[1:]):
            cum.append(cum[-1] + a.dist(b))
        object.__setattr__(self, "vertices", tuple(verts))
        object.__setattr__(self, "cumulative_lengths", tuple(cum))

    @property
    def length(self) -> float:
        return self.cumulative_lengths[-1]

    @property
    def start(self) -> Point:
        return self.vertices[0]

    @property
    def end(self) -> Point:
        return self.vertices[-1]

    def reversed(self) -> "Polyline":
        return Polyline(tuple(reversed(self.vertices)))

    def point_at(self, s: float, tol: float = 1e-6) -> Point:
        """Point at arc length s from the first vertex.

        s is clamped into [0, length] within ``tol``; beyond that a
        ValueError is raised.
        """
        if s < -tol or s > self.length + tol:
            raise ValueError(f"arc length {s} outside [0, {self.length}]")
        s = min(self.length, max(0.0, s))
        cum = self.cumulative_lengths
        lo, hi = 0, len(cum) - 1
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if cum[mid] <= s:
                lo = mid
            else:
                hi = mid
        a, b = self.vertices[lo], self.vertices[lo + 1]
        seg = cum[lo + 1] - cum[lo]
        t = 0.0 if seg == 0.0 else (s - cum[lo]) / seg
        return Point(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))

    def project_arclength(self, p: Point) -> float:
        """Arc length of the point on the polyline closest to p."""
        best_s, best_d = 0.0, float("inf")
        for i in range(len(self.vertices) - 1):
            a, b = self.vertices[i], self.vertices[i + 1]
            ab2 = (b.x - a.x) ** 2 + (b.y - a.y) ** 2
            t = 0.0 if ab2 == 0.0 else min(
                1.0, max(0.0, ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / ab2)
            )
            q = Point(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
            d = p.dist(q)
            if d < best_d:
                best_d = d
                best_s = self.cumulative_lengths[i] + t * math.sqrt(ab2)
        return best_s

    def distance_to(self, p: Point) -> float:
        return min(
            point_segment_distance(p, self.vertices[i], self.vertices[i + 1])
            for i in range(len(self.vertices) - 1)
        )

    def subpath(self, s0: float, s1: float) -> "Polyline":
        """Subchain between arc lengths s0 <= s1."""
        s0 = max(0.0, min(self.length, s0))
        s1 = max(s0, min(self.length, s1))
        pts = [self.point_at(s0)]
        for v, s in zip(self.vertices, self.cumulative_lengths):
            if s0 < s < s1:
                pts.append(v)
        pts.append(self.point_at(s1))
        return Polyline(tuple(pts))


def circle_polyline_intersections(
    center: Point, radius: float, p: Polyline, tol: float = DEFAULT_TOL
) -> list[tuple[Point, float]]:
    """All intersections of a circle with a polyline, sorted by arc parameter.

    Tangential touches are reported once; duplicate hits at shared segment
    endpoints are merged.
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    out: list[tuple[Point, float]] = []
    for i in range(len(p.vertices) - 1):
        a, b = p.vertices[i], p.vertices[i + 1]
        dx, dy = b.x - a.x, b.y - a.y
        fx, fy = a.x - center.x, a.y - center.y
        qa = dx * dx + dy * dy
        if qa == 0.0:
            continue
        qb = 2.0 * (fx * dx + fy * dy)
        qc = fx * fx + fy * fy - radius * radius
        disc = qb * qb - 4.0 * qa * qc
        if disc < -tol * max(qa, 1.0):
            continue
        disc = max(disc, 0.0)
        sq = math.sqrt(disc)
        seg_len = math.sqrt(qa)
        ts = [(-qb - sq) / (2 * qa), (-qb + sq) / (2 * qa)]
        if disc == 0.0:
            ts = ts[:1]
        for t in ts:
            if -tol <= t <= 1.0 + tol:
                t = min(1.0, max(0.0, t))
                pt = Point(a.x + t * dx, a.y + t * dy)
                s = p.cumulative_lengths[i] + t * seg_len
                if out and abs(out[-1][1] - s) <= tol * max(1.0, p.length) and out[-1][0].dist(pt) <= tol * max(1.0, radius):
                    continue
                out.append((pt, s))
    out.sort(key=lambda item: item[1])
    dedup: list[tuple[Point, float]] = []
    for pt, s in out:
        if dedup and abs(dedup[-1][1] - s) <= 1e-9 * max(1.0, p.length):
            continue
        dedup.append((pt, s))
    return dedup


class Containment(Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class Polygon:
    """Simple polygon, stored counterclockwise."""

    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = [Point(*v) for v in self.vertices]
        # Drop a duplicated closing vertex and consecutive duplicates.
        if len(verts) > 1 and verts[0].dist(verts[-1]) == 0.0:
            verts.pop()
        cleaned = []
        for v in verts:
            if not cleaned or v.dist(cleaned[-1]) > 0.0:
                cleaned.append(v)
        if len(cleaned) < 3:
            raise ValueError("polygon needs at least 3 distinct vertices")
        if signed_area(cleaned) < 0.0:
            cleaned.reverse()
        object.__setattr__(self, "vertices", tuple(cleaned))

    @property
    def area(self) -> float:
        return signed_area(list(self.vertices))

    def edges(self) -> list[tuple[Point, Point]]:
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def perimeter(self) -> float:
        return sum(a.dist(b) for a, b in self.edges())

    def is_simple(self, tol: float = DEFAULT_TOL) -> bool:
        """True when no two non-adjacent edges intersect."""
        es = self.edges()
        n = len(es)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i or (j == (i + 1) % n) or ((j + 1) % n == i):
                    continue
                hit = segment_intersection(*es[i], *es[j], tol=tol)
                if hit is not None:
                    return False
        return True

    def closed_polyline(self) -> Polyline:
        return Polyline(self.vertices + (self.vertices[0],))


def signed_area(vertices: Sequence[Point]) -> float:
    total = 0.0
    n = len(vertices)
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        total += a.x * b.y - b.x * a.y
    return 0.5 * total


def point_in_polygon(q: Point, poly: Polygon, tol: float = DEFAULT_TOL) -> Containment:
    """Even-odd containment with a boundary tolerance."""
    verts = poly.vertices
    n = len(verts)
    scale = max(1.0, max(abs(v.x) + abs(v.y) for v in verts))
    eps = tol * scale
    for i in range(n):
        if point_segment_distance(q, verts[i], verts[(i + 1) % n]) <= eps:
            return Containment.BOUNDARY
    inside = False
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        if (a.y > q.y) != (b.y > q.y):
            x_cross = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if q.x < x_cross:
                inside = not inside
    return Containment.INSIDE if inside else Containment.OUTSIDE
