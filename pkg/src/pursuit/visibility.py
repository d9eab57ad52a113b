"""Visibility-graph shortest paths inside a closed polygonal free space.

The free space is a shapely polygon (possibly with holes). Graph vertices
are the polygon's ring vertices; two vertices are adjacent iff the closed
segment between them stays inside the free space. Query points are
attached on the fly via per-query overlays; the graph itself is immutable.

Ties between equal-length paths are broken by the lexicographically
smallest sequence of vertex ids, with ids assigned in (y, x) order, which
makes every caller deterministic.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Optional

import shapely
from shapely.geometry import LineString, Point as ShapelyPoint, Polygon as ShapelyPolygon

from .geom import Point, Polyline

_TIE = 1e-12


@dataclass(frozen=True)
class PathResult:
    polyline: Polyline
    length: float
    vertex_ids: tuple[int, ...]


class VisibilityGraph:
    """Immutable visibility graph over a closed polygonal region."""

    def __init__(self, region: ShapelyPolygon, pinch_tol: float = 0.0):
        """``pinch_tol`` > 0 additionally connects vertex pairs closer than
        that distance even when the joining segment leaves the region; the
        territory layer uses it to make hair-width cut pinches passable.
        """
        if region.is_empty:
            raise ValueError("empty region")
        self.region = region
        shapely.prepare(self.region)
        # Containment queries use a hair-width dilation so that points
        # computed by interpolation along boundary edges, which can land a
        # few ulps outside the exact polygon, still count as inside. The
        # dilation is orders of magnitude below any cut width, so it never
        # bridges a gap.
        minx, miny, maxx, maxy = region.bounds
        scale = max(maxx - minx, maxy - miny, 1.0)
        self._fat = region.buffer(1e-12 * scale, join_style="mitre")
        shapely.prepare(self._fat)
        verts: list[Point] = []
        seen: set[tuple[float, float]] = set()
        rings = [region.exterior, *region.interiors]
        for ring in rings:
            for x, y in ring.coords[:-1]:
                key = (x, y)
                if key not in seen:
                    seen.add(key)
                    verts.append(Point(x, y))
        verts.sort(key=lambda p: (p.y, p.x))
        self.vertices: tuple[Point, ...] = tuple(verts)
        self._index = {(p.x, p.y): i for i, p in enumerate(verts)}
        n = len(verts)
        self.adjacency: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                w = verts[i].dist(verts[j])
                if w <= pinch_tol or self._segment_inside(verts[i], verts[j]):
                    self.adjacency[i].append((j, w))
                    self.adjacency[j].append((i, w))
        self._tree_cache: dict[tuple[float, float], tuple[list[float], list[tuple[int, ...]]]] = {}
        self._visible_cache: dict[tuple[float, float], list[tuple[int, float]]] = {}

    # -- primitives ------------------------------------------------------

    def _segment_inside(self, a: Point, b: Point) -> bool:
        if a.dist(b) == 0.0:
            return self.contains(a)
        line = LineString([(a.x, a.y), (b.x, b.y)])
        return bool(self.region.covers(line) or self._fat.covers(line))

    def contains(self, p: Point) -> bool:
        sp = ShapelyPoint(p.x, p.y)
        return bool(self.region.covers(sp) or self._fat.covers(sp))

    def visible(self, a: Point, b: Point) -> bool:
        return self._segment_inside(a, b)

    def visible_vertices(self, p: Point) -> list[tuple[int, float]]:
        """Indices and distances of graph vertices visible from p (cached)."""
        key = (p.x, p.y)
        hit = self._visible_cache.get(key)
        if hit is not None:
            return hit
        idx = self._index.get(key)
        out: list[tuple[int, float]] = []
        if idx is not None:
            out = [(j, w) for j, w in self.adjacency[idx]]
            out.append((idx, 0.0))
        else:
            for i, v in enumerate(self.vertices):
                if self._segment_inside(p, v):
                    out.append((i, p.dist(v)))
        if len(self._visible_cache) > 4096:
            self._visible_cache.clear()
        self._visible_cache[key] = out
        return out

    # -- shortest paths --------------------------------------------------

    def source_tree(self, source: Point) -> tuple[list[float], list[tuple[int, ...]]]:
        """Distances and id-paths from ``source`` to every graph vertex.

        The id-path for a vertex is the tie-broken sequence of vertex ids
        from the source (the source itself is not included). Cached per
        source coordinate.
        """
        key = (source.x, source.y)
        cached = self._tree_cache.get(key)
        if cached is not None:
            return cached
        n = len(self.vertices)
        dist = [math.inf] * n
        paths: list[tuple[int, ...]] = [()] * n
        heap: list[tuple[float, tuple[int, ...], int]] = []
        for i, w in self.visible_vertices(source):
            entry = (w, (i,), i)
            heapq.heappush(heap, entry)
        done = [False] * n
        while heap:
            d, path, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            dist[u] = d
            paths[u] = path
            for v, w in self.adjacency[u]:
                if done[v]:
                    continue
                nd = d + w
                if nd < dist[v] - _TIE or (nd <= dist[v] + _TIE and path + (v,) < paths[v]):
                    dist[v] = nd
                    paths[v] = path + (v,)
                    heapq.heappush(heap, (nd, paths[v], v))
        result = (dist, paths)
        if len(self._tree_cache) > 64:
            self._tree_cache.clear()
        self._tree_cache[key] = result
        return result

    def distance(self, a: Point, b: Point) -> float:
        return self.shortest_path(a, b).length

    def distance_via_tree(self, a: Point, b: Point) -> float:
        """Distance using (and caching) the source tree at ``a``."""
        if self.visible(a, b):
            return a.dist(b)
        dist, _ = self.source_tree(a)
        best = math.inf
        for i, w in self.visible_vertices(b):
            best = min(best, dist[i] + w)
        return best

    def shortest_path(self, a: Point, b: Point) -> PathResult:
        """Tie-broken shortest path between two points in the region."""
        best_len = math.inf
        best_ids: Optional[tuple[int, ...]] = None
        direct = self.visible(a, b)
        if direct:
            best_len = a.dist(b)
            best_ids = ()
        dist, paths = self.source_tree(a)
        for i, w in self.visible_vertices(b):
            if dist[i] == math.inf:
                continue
            cand = dist[i] + w
            cand_ids = paths[i]
            if cand < best_len - _TIE or (
                cand <= best_len + _TIE and (best_ids is None or cand_ids < best_ids)
            ):
                # Direct connection wins ties (empty sequence is smallest).
                if best_ids is not None and best_ids == () and cand >= best_len - _TIE:
                    continue
                best_len = cand
                best_ids = cand_ids
        if best_ids is None:
            raise ValueError(f"points {a} and {b} are not connected in the region")
        pts = [a, *[self.vertices[i] for i in best_ids], b]
        poly = Polyline(tuple(pts))
        return PathResult(poly, poly.length, best_ids)
