"""Geodesic paths in a territory: shortest, homotopy-distinct, and projections.

The "second shortest path" of a different homotopy class is produced by the
snip construction: remove a tiny triangular set at the first point where
the shortest path touches the target obstacle, then search the snipped
region. The class-constrained lifted search is the fallback and the
verification route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from shapely.geometry import Point as ShapelyPoint, Polygon as ShapelyPolygon

from .geom import Point, Polyline, signed_area
from .homotopy import RaySystem, Word, invert_word, lifted_shortest_paths, reduce_word
from .territory import Territory
from .visibility import VisibilityGraph


class PathError(ValueError):
    pass


class SplitPointError(ValueError):
    pass


@dataclass(frozen=True)
class GeodesicPath:
    """Polyline path with arc length, homotopy word, and obstacle contacts."""

    polyline: Polyline
    length: float
    signature: Word
    touched_obstacles: tuple[int, ...]

    @property
    def start(self) -> Point:
        return self.polyline.start

    @property
    def end(self) -> Point:
        return self.polyline.end


def _word_cap(t: Territory) -> int:
    return 2 * len(t.obstacles) + 2


def contained_ids(t: Territory) -> tuple[int, ...]:
    return tuple(sorted(t.obstacles.keys()))


def _class_dist_cap(t: Territory, base: float) -> float:
    """Length budget for lifted-class searches from a known base distance.

    Any relevant alternative class detours around some subset of the
    contained obstacles, so one extra perimeter sum bounds its length;
    pruning beyond it keeps the lifted state space from exploding.
    """
    extra = sum(ob.perimeter() for ob in t.obstacles.values())
    return base + extra + 1.0


def make_path(t: Territory, rays: RaySystem, polyline: Polyline) -> GeodesicPath:
    ids = contained_ids(t)
    sig = rays.signature(polyline, ids)
    touched = tuple(
        oid
        for oid in ids
        if min(
            polyline.distance_to(v) for v in t.obstacles[oid].vertices
        ) <= t.tol.tag
        or _touches_ring(polyline, t, oid)
    )
    return GeodesicPath(polyline, polyline.length, sig, touched)


def _touches_ring(polyline: Polyline, t: Territory, oid: int) -> bool:
    from shapely.geometry import LineString

    ring = LineString([(p.x, p.y) for p in t.obstacles[oid].vertices] + [
        (t.obstacles[oid].vertices[0].x, t.obstacles[oid].vertices[0].y)
    ])
    line = LineString([(p.x, p.y) for p in polyline.vertices])
    return ring.distance(line) <= t.tol.tag


def shortest_path(t: Territory, rays: RaySystem, a: Point, b: Point) -> GeodesicPath:
    """Globally shortest path in the territory, deterministically tie-broken."""
    res = t.graph.shortest_path(a, b)
    return make_path(t, rays, res.polyline)


def homotopy_signature(t: Territory, rays: RaySystem, p: Polyline) -> Word:
    return rays.signature(p, contained_ids(t))


# -- snip construction ---------------------------------------------------


def second_shortest_path(
    t: Territory, rays: RaySystem, pi1: GeodesicPath, touch: int
) -> GeodesicPath:
    """Shortest (u,v)-path of a homotopy class that separates ``touch``.

    Implements the triangular-snip construction at the first touch point;
    the shared-subcurve case removes a small boundary ball instead.
    """
    if touch not in pi1.touched_obstacles:
        raise PathError(f"path does not touch obstacle {touch}")
    candidates = _snip_candidates(t, rays, pi1, (touch,))
    best = _pick_distinct(t, rays, pi1.signature, candidates, must_separate=(touch,),
                          forbidden=(pi1.signature,))
    if best is None:
        best = _lifted_fallback(t, rays, pi1.start, pi1.end, forbidden=(pi1.signature,),
                                must_separate={touch: pi1.signature})
    if best is None:
        raise PathError("no homotopy-distinct path found")
    return best


def third_path(
    t: Territory,
    rays: RaySystem,
    pi1: GeodesicPath,
    pi2: GeodesicPath,
    touch1: int,
    touch2: int,
) -> GeodesicPath:
    """Path with homotopy class distinct from both bounding paths."""
    if touch1 == touch2:
        raise PathError("bounding paths must touch distinct obstacles")
    snips1 = _snip_regions(t, pi1, touch1)
    snips2 = _snip_regions(t, pi2, touch2)
    forbidden = (pi1.signature, pi2.signature)
    candidates: list[GeodesicPath] = []
    for s1 in snips1:
        for s2 in snips2:
            region = t.polygon.difference(s1).difference(s2)
            path = _shortest_in_region(region, t, rays, pi1.start, pi1.end)
            if path is not None:
                candidates.append(path)
    best = _pick_distinct(t, rays, None, candidates, must_separate=(touch1, touch2),
                          forbidden=forbidden,
                          separate_against={touch1: pi1.signature, touch2: pi2.signature})
    if best is None:
        best = _lifted_fallback(
            t,
            rays,
            pi1.start,
            pi1.end,
            forbidden=forbidden,
            must_separate={touch1: pi1.signature, touch2: pi2.signature},
        )
    if best is None:
        raise PathError("no third path of distinct homotopy class found")
    return best


def _snip_candidates(
    t: Territory, rays: RaySystem, pi: GeodesicPath, touches: tuple[int, ...]
) -> list[GeodesicPath]:
    out: list[GeodesicPath] = []
    for touch in touches:
        for region_cut in _snip_regions(t, pi, touch):
            region = t.polygon.difference(region_cut)
            path = _shortest_in_region(region, t, rays, pi.start, pi.end)
            if path is not None:
                out.append(path)
    return out


def _snip_regions(t: Territory, pi: GeodesicPath, touch: int) -> list[ShapelyPolygon]:
    """Candidate open sets to remove near the first path/obstacle contact."""
    ob = t.obstacles[touch]
    ring = ob.closed_polyline()
    tol = t.tol.tag
    verts = pi.polyline.vertices
    cum = pi.polyline.cumulative_lengths
    # Shared-subcurve case: a whole path segment runs along the obstacle ring.
    for i in range(len(verts) - 1):
        mid = Point(0.5 * (verts[i].x + verts[i + 1].x), 0.5 * (verts[i].y + verts[i + 1].y))
        if (
            ring.distance_to(verts[i]) <= tol
            and ring.distance_to(verts[i + 1]) <= tol
            and ring.distance_to(mid) <= tol
        ):
            eps = _snip_eps(t, pi, cum[i], cum[i + 1])
            return [ShapelyPoint(mid.x, mid.y).buffer(eps, quad_segs=4)]
    # Point-contact case: triangular snip at the first touch vertex.
    touch_idx = None
    for i, v in enumerate(verts):
        if ring.distance_to(v) <= tol:
            touch_idx = i
            break
    if touch_idx is None or touch_idx in (0,) and len(verts) == 1:
        return []
    x = verts[touch_idx]
    s_x = cum[touch_idx]
    ring_s = ring.project_arclength(x)
    eps = _snip_eps(t, pi, s_x, s_x)
    regions: list[ShapelyPolygon] = []
    for path_dir in (1, -1):
        s_y = s_x + path_dir * eps
        if s_y < 0.0 or s_y > pi.length:
            continue
        y = pi.polyline.point_at(s_y)
        for ring_dir in (1, -1):
            s_z = (ring_s + ring_dir * eps) % ring.length
            z = ring.point_at(s_z)
            tri = [(x.x, x.y), (y.x, y.y), (z.x, z.y)]
            if abs(signed_area([x, y, z])) < 1e-6 * eps * eps:
                continue
            poly = ShapelyPolygon(tri)
            if not poly.is_valid or poly.area <= 0.0:
                continue
            regions.append(poly)
    return regions


def _snip_eps(t: Territory, pi: GeodesicPath, s_lo: float, s_hi: float) -> float:
    edges = []
    cum = pi.polyline.cumulative_lengths
    for i in range(len(cum) - 1):
        if cum[i + 1] >= s_lo - 1e-12 and cum[i] <= s_hi + 1e-12:
            edges.append(cum[i + 1] - cum[i])
    shortest_edge = min(edges) if edges else pi.length
    d_min = t.d_min()
    base = min(d_min, shortest_edge) if math.isfinite(d_min) else shortest_edge
    return max(base / 4.0, 16 * t.tol.cut_width)


def _shortest_in_region(
    region, t: Territory, rays: RaySystem, a: Point, b: Point
) -> Optional[GeodesicPath]:
    if region.is_empty:
        return None
    if not isinstance(region, ShapelyPolygon):
        parts = [g for g in region.geoms if isinstance(g, ShapelyPolygon)]
        parts = [g for g in parts if g.covers(ShapelyPoint(a.x, a.y))]
        if not parts:
            return None
        region = parts[0]
    if not (
        region.covers(ShapelyPoint(a.x, a.y)) and region.covers(ShapelyPoint(b.x, b.y))
    ):
        return None
    try:
        graph = VisibilityGraph(region)
        res = graph.shortest_path(a, b)
    except ValueError:
        return None
    return make_path(t, rays, res.polyline)


def _pick_distinct(
    t: Territory,
    rays: RaySystem,
    base_sig: Optional[Word],
    candidates: list[GeodesicPath],
    must_separate: tuple[int, ...],
    forbidden: tuple[Word, ...],
    separate_against: Optional[dict[int, Word]] = None,
) -> Optional[GeodesicPath]:
    if separate_against is None and base_sig is not None:
        separate_against = {oid: base_sig for oid in must_separate}
    best: Optional[GeodesicPath] = None
    for cand in candidates:
        if cand.signature in forbidden:
            continue
        ok = True
        for oid, sig in (separate_against or {}).items():
            if not _separates(cand.signature, sig, oid):
                ok = False
                break
        if not ok:
            continue
        if best is None or cand.length < best.length - 1e-12:
            best = cand
    return best


def _separates(sig_a: Word, sig_b: Word, oid: int) -> bool:
    """True when the loop a + reversed(b) winds around obstacle ``oid``."""
    loop = reduce_word(sig_a + invert_word(sig_b))
    return any(obs == oid for obs, _ in loop)


def _lifted_fallback(
    t: Territory,
    rays: RaySystem,
    a: Point,
    b: Point,
    forbidden: tuple[Word, ...],
    must_separate: dict[int, Word],
) -> Optional[GeodesicPath]:
    ids = contained_ids(t)
    cap = _class_dist_cap(t, t.graph.distance_via_tree(a, b))
    classes = lifted_shortest_paths(t.graph, rays, ids, a, b, _word_cap(t), dist_cap=cap)
    best: Optional[GeodesicPath] = None
    for word, res in classes.items():
        if word in forbidden:
            continue
        if not all(_separates(word, sig, oid) for oid, sig in must_separate.items()):
            continue
        cand = make_path(t, rays, res.polyline)
        if best is None or cand.length < best.length - 1e-12:
            best = cand
    return best


def distinct_class_path(
    t: Territory,
    rays: RaySystem,
    a: Point,
    b: Point,
    forbidden: tuple[Word, ...],
) -> Optional[GeodesicPath]:
    """Shortest (a,b)-path whose homotopy class avoids ``forbidden``."""
    ids = contained_ids(t)
    cap = _class_dist_cap(t, t.graph.distance_via_tree(a, b))
    classes = lifted_shortest_paths(t.graph, rays, ids, a, b, _word_cap(t), dist_cap=cap)
    best: Optional[GeodesicPath] = None
    for word, res in sorted(classes.items(), key=lambda kv: (kv[1].length, kv[0])):
        if word in forbidden:
            continue
        cand = make_path(t, rays, res.polyline)
        if best is None or cand.length < best.length - 1e-12:
            best = cand
    return best


def guardable_certificate(
    t: Territory, rays: RaySystem, pi1: GeodesicPath, pi2: GeodesicPath
) -> bool:
    """Every (u,v)-path strictly shorter than pi2 intersects pi1.

    Verified by class enumeration: any class with a representative shorter
    than pi2 must have signature equal to pi1's (paths of pi1's class that
    shortcut must cross pi1 when pi1 is the class minimum).
    """
    ids = contained_ids(t)
    classes = lifted_shortest_paths(
        t.graph, rays, ids, pi1.start, pi1.end, _word_cap(t), dist_cap=pi2.length
    )
    for word, res in classes.items():
        if res.length < pi2.length - t.tol.tag and word not in (pi1.signature,):
            return False
    return True


# -- split points --------------------------------------------------------


def find_split_point(
    t: Territory,
    rays: RaySystem,
    u: Point,
    delta: Polyline,
    samples: int = 32,
) -> tuple[Point, GeodesicPath, GeodesicPath]:
    """Point on ``delta`` with two shortest (u,x)-paths of distinct classes.

    The length gap between the two best homotopy classes is a continuous
    function of the arc parameter and vanishes exactly at split points;
    it is minimized by a coarse scan plus ternary refinement.
    """
    ids = contained_ids(t)
    if not ids:
        raise SplitPointError("territory contains no obstacles")
    from .homotopy import LiftedTree

    ss = sorted(
        {min(max(sv, 0.0), delta.length) for sv in delta.cumulative_lengths}
        | {delta.length * i / samples for i in range(samples + 1)}
    )
    # At a split the two best classes both equal the plain geodesic
    # distance, so the scan's largest base distance bounds every class
    # that can matter; the cap only prunes never-best detour classes.
    # Scan points fractionally outside the region (cut artifacts) report
    # an infinite distance and are ignored; they cannot host a split.
    bases = [t.graph.distance_via_tree(u, delta.point_at(s)) for s in ss]
    finite = [d for d in bases if math.isfinite(d)]
    if not finite:
        raise SplitPointError("domain arc is unreachable from the junction")
    base = max(finite)
    margin = max(ob.perimeter() for ob in t.obstacles.values())
    tree = LiftedTree(t.graph, rays, ids, u, _word_cap(t), dist_cap=base + margin)

    def gap_at(s: float) -> float:
        lengths = sorted(tree.class_lengths_to(delta.point_at(s)).values())
        if len(lengths) < 2:
            return math.inf
        return lengths[1] - lengths[0]
    gaps = [gap_at(s) for s in ss]
    i_min = min(range(len(ss)), key=lambda i: gaps[i])
    lo = ss[max(0, i_min - 1)]
    hi = ss[min(len(ss) - 1, i_min + 1)]
    while hi - lo > 0.01 * t.tol.split:
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if gap_at(m1) <= gap_at(m2):
            hi = m2
        else:
            lo = m1
    s_star = 0.5 * (lo + hi)
    if gap_at(s_star) > t.tol.split:
        raise SplitPointError(
            f"no split point on the arc: min class gap {gap_at(s_star):.3e}"
        )
    x = delta.point_at(s_star)
    classes = tree.classes_to(x)
    ranked = sorted(classes.items(), key=lambda kv: (kv[1].length, kv[0]))
    res_a, res_b = ranked[0][1], ranked[1][1]
    pa = make_path(t, rays, res_a.polyline)
    pb = make_path(t, rays, res_b.polyline)
    return x, pa, pb


# -- projection and minimality ------------------------------------------


def path_projection(t: Territory, pi: GeodesicPath, z: Point) -> Point:
    """Projection of z onto pi with anchor at pi.start, clamped at the end."""
    d = t.graph.distance_via_tree(pi.start, z)
    if d >= pi.length:
        return pi.end
    return pi.polyline.point_at(d)


def projection_arclength(t: Territory, pi: GeodesicPath, z: Point) -> float:
    return min(t.graph.distance_via_tree(pi.start, z), pi.length)


def is_minimal_path(
    t: Territory, pi: GeodesicPath, samples: int = 32, rng=None
) -> tuple[bool, Optional[tuple[Point, Point, Point]]]:
    """Sampled check of the minimal-path inequality; witness on failure.

    Detour points cover all visibility-graph vertices plus ``samples``
    random free-space points when an rng is supplied.
    """
    import random as _random

    from .territory import sample_free_point

    rng = rng or _random.Random(0)
    n_y = max(4, min(12, len(pi.polyline.vertices) + 2))
    ys = [pi.polyline.point_at(pi.length * i / (n_y - 1)) for i in range(n_y)]
    s_of = {id(y): pi.length * i / (n_y - 1) for i, y in enumerate(ys)}
    zs: list[Point] = list(t.graph.vertices)
    for _ in range(samples):
        try:
            zs.append(sample_free_point(t, rng))
        except ValueError:
            break
    tol = t.tol.tag
    for z in zs:
        dist_z, _ = t.graph.source_tree(z)
        d_to_y = [_point_distance_via(t.graph, dist_z, z, y) for y in ys]
        for i in range(len(ys)):
            for j in range(i + 1, len(ys)):
                d_pi = abs(s_of[id(ys[j])] - s_of[id(ys[i])])
                if d_pi > d_to_y[i] + d_to_y[j] + tol:
                    return False, (ys[i], ys[j], z)
    return True, None


def _point_distance_via(graph: VisibilityGraph, dist_src: list[float], src: Point, q: Point) -> float:
    best = math.inf
    if graph.visible(src, q):
        best = src.dist(q)
    for i, w in graph.visible_vertices(q):
        if math.isfinite(dist_src[i]):
            best = min(best, dist_src[i] + w)
    return best
