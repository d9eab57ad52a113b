"""Evader territory: tagged boundary, region typing, and cuts along guarded paths.

A territory is the closed region currently confining the evader. Its
boundary decomposes into arcs tagged either as domain boundary or as a
guarded path. Cutting removes a hair-width strip around the cut path and
keeps the component containing the evader. An obstacle the cut path
touches dissolves geometrically into the boundary of the evader's side
(a "lobe"); it stays in the territory's obstacle set while some guarded
path touches it, because homotopy classes around it still matter at any
scale above the hair width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import shapely
from shapely.geometry import (
    LineString,
    MultiPolygon,
    Point as ShapelyPoint,
    Polygon as ShapelyPolygon,
)

from .environment import Environment
from .geom import Containment, Point, Polygon, Polyline, point_in_polygon
from .tolerances import Tolerances
from .visibility import VisibilityGraph

REGION_INIT = "init"
REGION_0 = "0"
REGION_1 = "1"
REGION_1P = "1p"
REGION_2 = "2"
REGION_3 = "3"
REGION_COMPLEX = "complex"


class AmbiguousSideError(ValueError):
    """Evader lies on the cut path; the caller should capture instead."""


@dataclass(frozen=True)
class BoundaryArc:
    """Maximal run of boundary edges with one tag."""

    tag: str  # "domain" or "guard"
    guard: Optional[str]
    polyline: Polyline


@dataclass
class Territory:
    polygon: ShapelyPolygon
    obstacles: dict[int, Polygon]
    arcs: tuple[BoundaryArc, ...]
    region_type: str
    anchors: dict[str, Point]
    tol: Tolerances
    hole_ids: frozenset[int] = frozenset()
    _graph: Optional[VisibilityGraph] = field(default=None, repr=False)

    @property
    def graph(self) -> VisibilityGraph:
        if self._graph is None:
            # Pinch edges keep cut touch points passable for path planning.
            self._graph = VisibilityGraph(self.polygon, pinch_tol=16 * self.tol.cut_width)
        return self._graph

    def contains(self, p: Point) -> bool:
        return self.graph.contains(p)

    def guard_arcs(self, guard: str) -> list[BoundaryArc]:
        return [a for a in self.arcs if a.tag == "guard" and a.guard == guard]

    def active_guards(self) -> list[str]:
        seen: list[str] = []
        for a in self.arcs:
            if a.tag == "guard" and a.guard is not None and a.guard not in seen:
                seen.append(a.guard)
        return seen

    def dangerous_obstacles(self) -> list[int]:
        """Contained holes not touching any guarded arc."""
        touch = self.tol.tag
        out = []
        for oid, ob in self.obstacles.items():
            if oid not in self.hole_ids:
                continue
            ring = ob.closed_polyline()
            touching = False
            for arc in self.arcs:
                if arc.tag != "guard":
                    continue
                if _polyline_gap(ring, arc.polyline) <= touch:
                    touching = True
                    break
            if not touching:
                out.append(oid)
        return out

    def d_min(self) -> float:
        """Minimum positive separation between distinct boundary components.

        Pinch contacts (distance below the tagging tolerance) are treated
        as shared boundary points, not as separations.
        """
        rings = [self.polygon.exterior, *self.polygon.interiors]
        if len(rings) < 2:
            return math.inf
        best = math.inf
        for i in range(len(rings)):
            for j in range(i + 1, len(rings)):
                d = rings[i].distance(rings[j])
                if d > self.tol.tag:
                    best = min(best, d)
        return best

    def boundary_loop(self) -> Polyline:
        coords = list(self.polygon.exterior.coords)
        return Polyline(tuple(Point(x, y) for x, y in coords))


def _polyline_gap(a: Polyline, b: Polyline) -> float:
    la = LineString([(p.x, p.y) for p in a.vertices])
    lb = LineString([(p.x, p.y) for p in b.vertices])
    return la.distance(lb)


def initial_territory(env: Environment) -> Territory:
    free = env.free_space()
    obstacles = dict(enumerate(env.obstacles))
    arcs = (BoundaryArc("domain", None, Polyline(env.outer.vertices + (env.outer.vertices[0],))),)
    return Territory(
        polygon=free,
        obstacles=obstacles,
        arcs=arcs,
        region_type=REGION_INIT,
        anchors={},
        tol=env.tolerances(),
        hole_ids=frozenset(obstacles),
    )


def cut_territory(
    t: Territory,
    path: Polyline,
    evader: Point,
    guard_paths: dict[str, Polyline],
    new_guard: str,
) -> tuple[Territory, list[int]]:
    """Split ``t`` along ``path`` and keep the evader's side.

    ``guard_paths`` maps the keys of still-guarded paths (including
    ``new_guard`` -> ``path``) to their polylines; boundary arcs of the
    result are re-tagged against them. Returns the new territory and the
    ids of obstacles no longer contained in it.
    """
    w = t.tol.cut_width
    line = LineString([(p.x, p.y) for p in path.vertices])
    if ShapelyPoint(evader.x, evader.y).distance(line) <= w * 4:
        raise AmbiguousSideError("evader lies on the cut path")
    strip = line.buffer(w, quad_segs=1)
    region = t.polygon.difference(strip)
    pieces: list[ShapelyPolygon]
    if isinstance(region, MultiPolygon):
        pieces = list(region.geoms)
    elif isinstance(region, ShapelyPolygon):
        pieces = [region]
    else:
        pieces = [g for g in region.geoms if isinstance(g, ShapelyPolygon)]
    evader_pt = ShapelyPoint(evader.x, evader.y)
    piece = None
    for p in pieces:
        if p.covers(evader_pt):
            piece = p
            break
    if piece is None:
        # The evader can legally stand within the hair-width strip.
        piece = min(pieces, key=lambda p: p.distance(evader_pt))
        if piece.distance(evader_pt) > t.tol.tag:
            raise AmbiguousSideError("evader not adjacent to any component")
    piece = piece.simplify(3 * w, preserve_topology=True)
    contained: dict[int, Polygon] = {}
    holes: set[int] = set()
    for ring in piece.interiors:
        rep = ShapelyPolygon(ring).representative_point()
        rep_pt = Point(rep.x, rep.y)
        for oid, ob in t.obstacles.items():
            if point_in_polygon(rep_pt, ob, t.tol.geom) != Containment.OUTSIDE:
                contained[oid] = ob
                holes.add(oid)
                break
    # Obstacles dissolved into the boundary stay contained as lobes while
    # a guarded path touches them; otherwise they are inert and removed.
    boundary = piece.boundary
    for oid, ob in t.obstacles.items():
        if oid in holes:
            continue
        ring = ob.closed_polyline()
        # A lobe needs at least one ring edge exposed to the piece: the edge
        # lies on the piece boundary and is not itself covered by a guard
        # path. Edges coincident with a path belong to the path, so a pocket
        # on the far side of a path hugging the obstacle does not keep it.
        exposed = False
        for a, b in ob.edges():
            mid = Point(0.5 * (a.x + b.x), 0.5 * (a.y + b.y))
            if boundary.distance(ShapelyPoint(mid.x, mid.y)) > t.tol.tag:
                continue
            if all(pl.distance_to(mid) > t.tol.tag for pl in guard_paths.values()):
                exposed = True
                break
        if not exposed:
            continue
        guarded = any(
            _polyline_gap(ring, pl) <= t.tol.tag for pl in guard_paths.values()
        )
        if guarded:
            contained[oid] = ob
    removed = [oid for oid in t.obstacles if oid not in contained]
    new_t = _build_territory(piece, contained, frozenset(holes), guard_paths, t.tol)
    return new_t, removed


def _build_territory(
    piece: ShapelyPolygon,
    obstacles: dict[int, Polygon],
    hole_ids: frozenset[int],
    guard_paths: dict[str, Polyline],
    tol: Tolerances,
) -> Territory:
    arcs = _tag_arcs(piece, obstacles, guard_paths, tol)
    t = Territory(
        polygon=piece,
        obstacles=obstacles,
        arcs=arcs,
        region_type=REGION_COMPLEX,
        anchors={},
        tol=tol,
        hole_ids=hole_ids,
    )
    _retype(t)
    return t


def _tag_arcs(
    piece: ShapelyPolygon,
    obstacles: dict[int, Polygon],
    guard_paths: dict[str, Polyline],
    tol: Tolerances,
) -> tuple[BoundaryArc, ...]:
    coords = [Point(x, y) for x, y in piece.exterior.coords]
    n = len(coords) - 1  # closing vertex repeated
    tags: list[tuple[str, Optional[str]]] = []
    order = list(guard_paths.keys())
    rings = [ob.closed_polyline() for ob in obstacles.values()]
    for i in range(n):
        a, b = coords[i], coords[i + 1]
        mid = Point(0.5 * (a.x + b.x), 0.5 * (a.y + b.y))
        tag: tuple[str, Optional[str]] = ("domain", None)
        for key in order:
            pl = guard_paths[key]
            if (
                pl.distance_to(mid) <= tol.tag
                and pl.distance_to(a) <= tol.tag
                and pl.distance_to(b) <= tol.tag
            ):
                tag = ("guard", key)
                break
        if tag[0] == "domain":
            # Boundary stretches on an obstacle ring are lobes hanging off
            # the guarded side; they never count as domain wall for typing.
            for ring in rings:
                if (
                    ring.distance_to(mid) <= tol.tag
                    and ring.distance_to(a) <= tol.tag
                    and ring.distance_to(b) <= tol.tag
                ):
                    tag = ("lobe", None)
                    break
        tags.append(tag)
    # Rotate so the loop starts at a tag change (if any).
    start = 0
    for i in range(n):
        if tags[i] != tags[i - 1]:
            start = i
            break
    arcs: list[BoundaryArc] = []
    run_pts: list[Point] = []
    run_tag: Optional[tuple[str, Optional[str]]] = None
    for k in range(n):
        i = (start + k) % n
        if tags[i] != run_tag:
            if run_pts:
                run_pts.append(coords[(start + k) % n])
                arcs.append(BoundaryArc(run_tag[0], run_tag[1], Polyline(tuple(run_pts))))
            run_tag = tags[i]
            run_pts = [coords[i]]
        else:
            run_pts.append(coords[i])
    if run_pts:
        run_pts.append(coords[start])
        arcs.append(BoundaryArc(run_tag[0], run_tag[1], Polyline(tuple(run_pts))))
    return tuple(arcs)


def _retype(t: Territory) -> None:
    """Assign region type and anchor points from the tagged boundary."""
    arcs = t.arcs
    m = len(arcs)
    # A domain arc closing on itself is a lobe excursion hanging off a pinch
    # point; it decorates the surrounding run instead of interrupting it.
    def kind_of(i: int) -> str:
        a = arcs[i]
        if a.tag == "guard":
            return "guard"
        if a.tag == "lobe":
            return "x"
        if a.polyline.start.dist(a.polyline.end) <= t.tol.tag:
            return "x"
        return "domain"

    kinds = [kind_of(i) for i in range(m)]
    real = [k for k in kinds if k != "x"]
    if "guard" not in real:
        guard_runs: list[list[int]] = []
        domain_runs = [[i for i in range(m)]] if m else []
    elif "domain" not in real:
        # Fully guarded boundary, possibly interleaved with obstacle lobes:
        # split runs where the guarding pursuer changes.
        def key_of(i: int) -> Optional[str]:
            for step in range(m):
                a = arcs[(i - step) % m]
                if a.tag == "guard":
                    return a.guard
            return None

        first = next(i for i in range(m) if kinds[i] == "guard")
        start = first
        for i in range(m):
            if kinds[i] == "guard" and key_of((i - 1) % m) != arcs[i].guard:
                start = i
                break
        guard_runs, domain_runs = [], []
        cur = []
        cur_key: Optional[str] = None
        for k in range(m):
            i = (start + k) % m
            if kinds[i] == "x":
                if cur:
                    cur.append(i)
                continue
            if arcs[i].guard != cur_key:
                if cur:
                    guard_runs.append(cur)
                cur = [i]
                cur_key = arcs[i].guard
            else:
                cur.append(i)
        if cur:
            guard_runs.append(cur)
    else:
        start = next(
            i
            for i in range(m)
            if kinds[i] == "guard" and _prev_real(kinds, i) != "guard"
        )
        guard_runs, domain_runs = [], []
        cur: list[int] = []
        cur_kind: Optional[str] = None
        for k in range(m):
            i = (start + k) % m
            kind = kinds[i]
            if kind == "x" and cur:
                cur.append(i)
                continue
            if kind == "x":
                kind = "guard"  # excursion at rotation start joins the first run
            if kind != cur_kind:
                if cur:
                    (guard_runs if cur_kind == "guard" else domain_runs).append(cur)
                cur = [i]
                cur_kind = kind
            else:
                cur.append(i)
        if cur:
            (guard_runs if cur_kind == "guard" else domain_runs).append(cur)
    g, d = len(guard_runs), len(domain_runs)
    anchors: dict[str, Point] = {}
    # Type 0 requires a simply connected region with no obstacle structure.
    if not t.obstacles:
        t.region_type = REGION_0
        t.anchors = anchors
        return

    def run_guard_arcs(run: list[int]) -> list[int]:
        return [i for i in run if arcs[i].tag == "guard"]

    if g == 1 and d == 1:
        garcs = run_guard_arcs(guard_runs[0])
        keys = []
        for i in garcs:
            if arcs[i].guard not in keys:
                keys.append(arcs[i].guard)
        anchors["v"] = arcs[garcs[0]].polyline.start
        anchors["w"] = arcs[garcs[-1]].polyline.end
        if len(keys) > 1:
            # apex where the two guarded paths of the composite side meet
            apex_idx = next(i for i in garcs if arcs[i].guard != arcs[garcs[0]].guard)
            prior = garcs[garcs.index(apex_idx) - 1]
            anchors["u"] = arcs[prior].polyline.end
            t.region_type = REGION_1
        else:
            anchors["u"] = arcs[garcs[0]].polyline.start
            t.region_type = REGION_1P
        t.anchors = anchors
        return
    if g == 2 and d == 0:
        g1 = run_guard_arcs(guard_runs[0])
        g2 = run_guard_arcs(guard_runs[1])
        anchors["u"] = arcs[g1[0]].polyline.start
        anchors["v"] = arcs[g1[-1]].polyline.end
        anchors["w"] = arcs[g2[0]].polyline.start
        anchors["x"] = arcs[g2[-1]].polyline.end
        t.region_type = REGION_2
        t.anchors = anchors
        return
    if g == 2 and d == 2:
        # boundary cycle: guard run, domain run, guard run, domain run
        g1 = run_guard_arcs(guard_runs[0])
        g2 = run_guard_arcs(guard_runs[1])
        anchors["u"] = arcs[g1[0]].polyline.start
        anchors["v"] = arcs[g1[-1]].polyline.end
        anchors["w"] = arcs[g2[0]].polyline.start
        anchors["x"] = arcs[g2[-1]].polyline.end
        t.region_type = REGION_3
        t.anchors = anchors
        return
    t.region_type = REGION_COMPLEX
    t.anchors = anchors


def _prev_real(kinds: list[str], i: int) -> str:
    m = len(kinds)
    for step in range(1, m + 1):
        k = kinds[(i - step) % m]
        if k != "x":
            return k
    return "x"


def sample_free_point(t: Territory, rng, margin: float = 0.0) -> Point:
    """Rejection-sample a point of the territory, seeded by ``rng``."""
    minx, miny, maxx, maxy = t.polygon.bounds
    for _ in range(10000):
        p = Point(rng.uniform(minx, maxx), rng.uniform(miny, maxy))
        sp = ShapelyPoint(p.x, p.y)
        if t.polygon.covers(sp) and (margin <= 0.0 or t.polygon.boundary.distance(sp) >= margin):
            return p
    raise ValueError("could not sample a free point")
