"""Round orchestration for the three-pursuer strategy.

Each round guards one new path chosen by the evader territory's region
type, cuts the territory along it once the guard locks, and updates the
per-obstacle threat ledger. At most two paths are ever guarded at once,
so the third pursuer is always free for the next round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .geom import Point, Polyline
from .geodesic import (
    GeodesicPath,
    SplitPointError,
    contained_ids,
    distinct_class_path,
    find_split_point,
    make_path,
    shortest_path,
    third_path,
)
from .homotopy import RaySystem
from .territory import (
    REGION_0,
    REGION_1,
    REGION_1P,
    REGION_2,
    REGION_3,
    REGION_INIT,
    Territory,
    cut_territory,
)

DANGEROUS = "dangerous"
SAFE = "safe"
REMOVED = "removed"
_RANK = {DANGEROUS: 0, SAFE: 1, REMOVED: 2}

KIND_INIT = "init"
KIND_TYPE1 = "type1"
KIND_TYPE2 = "type2"
KIND_TYPE3 = "type3"
KIND_FALLBACK = "fallback"
KIND_ENDGAME = "endgame"


class LedgerError(AssertionError):
    pass


@dataclass
class ThreatLedger:
    """Monotone per-obstacle threat states with transition history."""

    states: dict[int, str]
    round_no: int = 0
    transitions: list[tuple[int, int, str, str]] = field(default_factory=list)

    @classmethod
    def initial(cls, obstacle_ids) -> "ThreatLedger":
        return cls(states={oid: DANGEROUS for oid in obstacle_ids})

    def mark(self, oid: int, new_state: str) -> bool:
        """Transition an obstacle forward; no-op when already there."""
        old = self.states[oid]
        if old == new_state:
            return False
        if _RANK[new_state] < _RANK[old]:
            raise LedgerError(f"obstacle {oid}: illegal transition {old} -> {new_state}")
        self.states[oid] = new_state
        self.transitions.append((self.round_no, oid, old, new_state))
        return True

    def count(self, state: str) -> int:
        return sum(1 for s in self.states.values() if s == state)


@dataclass(frozen=True)
class RoundPlan:
    round_kind: str
    path: Optional[GeodesicPath]
    assigned: str
    released: tuple[str, ...] = ()
    lion_center: Optional[Point] = None


def plan_initialization(t: Territory, rays: RaySystem, assigned: str) -> RoundPlan:
    """First round: split the outer perimeter in half and guard the chord."""
    loop = t.boundary_loop()
    u = loop.start
    v = loop.point_at(loop.length / 2.0)
    path = shortest_path(t, rays, u, v)
    return RoundPlan(KIND_INIT, path, assigned)


def plan_round(
    t: Territory,
    rays: RaySystem,
    ledger: ThreatLedger,
    guards: dict[str, GeodesicPath],
    free: list[str],
) -> RoundPlan:
    """Choose the next path to guard based on the territory's region type."""
    if t.region_type == REGION_0:
        center = t.anchors.get("u", t.boundary_loop().start)
        return RoundPlan(KIND_ENDGAME, None, free[0], lion_center=center)
    if t.region_type == REGION_INIT:
        return plan_initialization(t, rays, free[0])
    if not free:
        raise ValueError("no free pursuer available for the next round")
    assigned = free[0]
    try:
        if t.region_type in (REGION_1, REGION_1P):
            path = _plan_split_round(t, rays)
            return RoundPlan(KIND_TYPE1, path, assigned)
        if t.region_type == REGION_2:
            path = _plan_third_path_round(t, rays, guards)
            return RoundPlan(KIND_TYPE2, path, assigned)
        if t.region_type == REGION_3:
            path = shortest_path(t, rays, t.anchors["u"], t.anchors["w"])
            return RoundPlan(KIND_TYPE3, path, assigned)
    except (SplitPointError, ValueError):
        pass
    return RoundPlan(KIND_FALLBACK, _plan_fallback(t, rays), assigned)


def _guard_clearance(t: Territory, path: GeodesicPath) -> float:
    """Minimum distance from the path's interior vertices to guarded arcs."""
    guard_arcs = [a for a in t.arcs if a.tag == "guard"]
    inner = path.polyline.vertices[1:-1]
    if not guard_arcs:
        return math.inf
    if not inner:
        inner = (path.polyline.point_at(path.length / 2.0),)
    return min(min(a.polyline.distance_to(q) for a in guard_arcs) for q in inner)


def _domain_chain(t: Territory) -> Polyline:
    """Concatenated domain-side boundary, skipping self-closing lobe loops."""
    pts: list[Point] = []
    for arc in t.arcs:
        if arc.tag != "domain":
            continue
        if arc.polyline.start.dist(arc.polyline.end) <= t.tol.tag:
            continue
        vs = arc.polyline.vertices
        if pts and pts[-1].dist(vs[0]) <= t.tol.tag:
            pts.extend(vs[1:])
        else:
            pts.extend(vs)
    if len(pts) < 2:
        raise SplitPointError("territory has no domain boundary to scan")
    return Polyline(tuple(pts))


def _plan_split_round(t: Territory, rays: RaySystem) -> GeodesicPath:
    u = t.anchors["u"]
    delta = _domain_chain(t)
    _, pa, pb = find_split_point(t, rays, u, delta)
    # When the split lands on a guarded path's endpoint, one candidate hugs
    # that path and would cut nothing; prefer the one with clearance.
    ca, cb = _guard_clearance(t, pa), _guard_clearance(t, pb)
    if abs(ca - cb) <= t.tol.tag:
        return pa if pa.length <= pb.length else pb
    return pa if ca > cb else pb


def _plan_third_path_round(
    t: Territory, rays: RaySystem, guards: dict[str, GeodesicPath]
) -> GeodesicPath:
    names = t.active_guards()
    if len(names) < 2:
        raise ValueError("type 2 territory without two guarded paths")
    if not t.hole_ids:
        # Disk whose obstacles are boundary lobes between the two guarded
        # runs: a chord joining a pinch corner of each run separates the
        # lobes, so the cut removes one obstacle and frees one guard.
        a = t.anchors
        best: Optional[GeodesicPath] = None
        for p, q in ((a.get("v"), a.get("x")), (a.get("u"), a.get("w"))):
            if p is None or q is None or p.dist(q) <= t.tol.tag:
                continue
            cand = shortest_path(t, rays, p, q)
            if best is None or cand.length < best.length:
                best = cand
        if best is not None:
            return best
        raise ValueError("no separating chord between the guarded runs")
    p1 = make_path(t, rays, guards[names[0]].polyline)
    p2 = make_path(t, rays, guards[names[1]].polyline)
    touches1 = [o for o in p1.touched_obstacles]
    touches2 = [o for o in p2.touched_obstacles if o not in touches1[:1]]
    if touches1 and touches2:
        try:
            return third_path(t, rays, p1, p2, touches1[0], touches2[0])
        except ValueError:
            pass
    path = distinct_class_path(
        t, rays, p1.start, p1.end, forbidden=(p1.signature, p2.signature)
    )
    if path is None:
        raise ValueError("no third homotopy class available")
    return path


def _plan_fallback(t: Territory, rays: RaySystem) -> GeodesicPath:
    """Last-resort round: try a split from any guard junction, else bisect
    the full boundary loop with a chord."""
    anchors = [t.anchors[k] for k in ("u", "v", "w", "x") if k in t.anchors]
    for u in anchors:
        try:
            delta = _domain_chain(t)
            _, pa, pb = find_split_point(t, rays, u, delta)
            ca, cb = _guard_clearance(t, pa), _guard_clearance(t, pb)
            return pa if ca >= cb else pb
        except SplitPointError:
            continue
    loop = t.boundary_loop()
    u = loop.start
    v = loop.point_at(loop.length / 2.0)
    return shortest_path(t, rays, u, v)


def apply_round_outcome(
    t: Territory,
    rays: RaySystem,
    ledger: ThreatLedger,
    plan: RoundPlan,
    evader: Point,
    guards: dict[str, GeodesicPath],
) -> tuple[Territory, dict[str, GeodesicPath], list[str], list[int]]:
    """Cut along the plan's locked path and refresh guards and ledger.

    Returns the new territory, the surviving guards with their trimmed
    paths, the released pursuer names, and the removed obstacle ids.
    """
    if plan.path is None:
        raise ValueError("endgame plans carry no path to cut along")
    guard_paths: dict[str, Polyline] = {plan.assigned: plan.path.polyline}
    for name, gp in guards.items():
        if name != plan.assigned:
            guard_paths[name] = gp.polyline
    new_t, removed = cut_territory(t, plan.path.polyline, evader, guard_paths, plan.assigned)
    ledger.round_no += 1
    for oid in removed:
        ledger.mark(oid, REMOVED)
    dangerous = set(new_t.dangerous_obstacles())
    for oid in new_t.obstacles:
        if oid not in dangerous:
            ledger.mark(oid, SAFE)
    all_paths = dict(guards)
    all_paths[plan.assigned] = plan.path
    new_guards: dict[str, GeodesicPath] = {}
    for name in new_t.active_guards():
        new_guards[name] = _trimmed_path(new_t, rays, name, all_paths[name])
    released = [n for n in all_paths if n not in new_guards]
    return new_t, new_guards, released, removed


def _trimmed_path(
    t: Territory, rays: RaySystem, name: str, original: GeodesicPath
) -> GeodesicPath:
    """Restrict a guarded path to the portion bounding the new territory.

    A subpath of a minimal path is minimal, so the result stays guardable;
    orientation follows the original path so the projection anchor is
    preserved.
    """
    arcs = t.guard_arcs(name)
    if not arcs:
        raise ValueError(f"guard {name} has no boundary arcs")
    pts: list[Point] = []
    for arc in arcs:
        vs = arc.polyline.vertices
        if pts and pts[-1].dist(vs[0]) <= t.tol.tag:
            pts.extend(vs[1:])
        else:
            pts.extend(vs)
    poly = Polyline(tuple(pts))
    s0 = original.polyline.project_arclength(poly.start)
    s1 = original.polyline.project_arclength(poly.end)
    if s0 > s1:
        poly = poly.reversed()
    return make_path(t, rays, poly)


def progress_metric(ledger: ThreatLedger, t: Territory) -> tuple[int, int, int]:
    """Lexicographic progress measure for the round sequence."""
    return (
        ledger.count(DANGEROUS),
        ledger.count(SAFE),
        1 if t.region_type == REGION_3 else 0,
    )
