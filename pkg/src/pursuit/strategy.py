"""Per-agent controllers: the lion endgame, path guards, and evader policies.

The lion controller wins in simply connected regions by staying on the
geodesic from a fixed center to the evader and advancing one unit along
it per turn; its squared center distance grows by at least one per turn.
Guards walk to a geodesic path, lock onto the evader's projection, and
capture anything that crosses the path while locked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Protocol

from .geom import Point, Polyline, circle_polyline_intersections
from .geodesic import GeodesicPath, path_projection, projection_arclength
from .homotopy import RaySystem
from .territory import Territory, sample_free_point
from .visibility import VisibilityGraph

PHASE_REACH = "reach"
PHASE_CHASE = "chase"
PHASE_LOCK = "lock"


def reachable(nav: VisibilityGraph, a: Point, b: Point, slack: float) -> bool:
    """True when b is within geodesic distance 1 + slack of a."""
    if a.dist(b) <= 1.0 + slack and nav.visible(a, b):
        return True
    return nav.distance_via_tree(a, b) <= 1.0 + slack


def step_toward(nav: VisibilityGraph, a: Point, b: Point) -> Point:
    """Move from a up to unit distance along the geodesic toward b."""
    if nav.visible(a, b) and a.dist(b) <= 1.0:
        return b
    path = nav.shortest_path(a, b).polyline
    return path.point_at(min(1.0, path.length))


@dataclass
class LionController:
    """Classical lion pursuit anchored at a fixed center point."""

    center: Point
    pos: Point
    phase: str = PHASE_REACH
    _prev_center_dist: Optional[float] = field(default=None, repr=False)

    def step(self, t: Territory, nav: VisibilityGraph, evader: Point) -> Point:
        if reachable(nav, self.pos, evader, t.tol.lion):
            self.pos = evader
            return self.pos
        if self.phase == PHASE_REACH:
            if self.pos.dist(self.center) <= 1.0 and nav.visible(self.pos, self.center):
                self.pos = self.center
                self.phase = PHASE_CHASE
                self._prev_center_dist = 0.0
            else:
                self.pos = step_toward(nav, self.pos, self.center)
            return self.pos
        pi = t.graph.shortest_path(self.center, evader).polyline
        q = self._lion_point(t, pi)
        new_dist = t.graph.distance_via_tree(self.center, q)
        if self._prev_center_dist is not None:
            gained = new_dist * new_dist - self._prev_center_dist * self._prev_center_dist
            if gained < 1.0 - 64 * t.tol.lion:
                raise AssertionError(f"lion ledger violated: gained {gained}")
        self._prev_center_dist = new_dist
        self.pos = q
        return self.pos

    def _lion_point(self, t: Territory, pi: Polyline) -> Point:
        """Farthest point along pi within unit geodesic reach of the position.

        A nearer circle intersection must never be used when the far one is
        occluded: that would walk the lion backward along the geodesic.
        """
        hits = circle_polyline_intersections(self.pos, 1.0, pi, t.tol.lion)
        if hits and t.graph.visible(self.pos, hits[-1][0]):
            return hits[-1][0]
        from .geodesic import _point_distance_via

        graph = t.graph
        # When the position already lies on pi, advancing one unit along
        # the path is always feasible: the path itself certifies geodesic
        # reach. Never return anything earlier than that.
        floor_s = -1.0
        if pi.distance_to(self.pos) <= t.tol.lion:
            floor_s = min(pi.project_arclength(self.pos) + 1.0, pi.length)
        dist_src, _ = graph.source_tree(self.pos)

        def ok(s: float) -> bool:
            q = pi.point_at(s)
            return _point_distance_via(graph, dist_src, self.pos, q) <= 1.0

        if ok(pi.length):
            return pi.end
        n = max(8, int(pi.length / 0.25))
        best_i = None
        for i in range(n + 1):
            if ok(pi.length * i / n):
                best_i = i
        if best_i is None:
            if floor_s >= 0.0:
                return pi.point_at(floor_s)
            return self.pos
        lo = pi.length * best_i / n
        hi = min(pi.length, pi.length * (best_i + 1) / n)
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if ok(mid):
                lo = mid
            else:
                hi = mid
        return pi.point_at(max(lo, floor_s))


@dataclass
class GuardController:
    """Pursuer assigned to guard one geodesic path."""

    name: str
    path: GeodesicPath
    pos: Point
    phase: str = PHASE_REACH
    arc: float = 0.0

    @property
    def locked(self) -> bool:
        return self.phase == PHASE_LOCK

    def retarget(self, t: Territory, path: GeodesicPath) -> None:
        """Swap in a replacement path, keeping the lock when still on it."""
        self.path = path
        if self.phase == PHASE_LOCK and path.polyline.distance_to(self.pos) <= t.tol.tag:
            self.arc = path.polyline.project_arclength(self.pos)
        elif self.phase != PHASE_REACH and path.polyline.distance_to(self.pos) <= t.tol.tag:
            self.phase = PHASE_CHASE
            self.arc = path.polyline.project_arclength(self.pos)
        else:
            self.phase = PHASE_REACH

    def step(self, t: Territory, nav: VisibilityGraph, evader: Point) -> Point:
        target_s = projection_arclength(t, self.path, evader)
        if self.phase == PHASE_REACH:
            anchor = self.path.start
            if self.pos.dist(anchor) <= 1.0 and nav.visible(self.pos, anchor):
                self.pos = anchor
                self.phase = PHASE_CHASE
                self.arc = 0.0
            else:
                self.pos = step_toward(nav, self.pos, anchor)
            return self.pos
        if self.phase == PHASE_CHASE:
            gap = target_s - self.arc
            if abs(gap) <= 1.0:
                self.arc = target_s
                self.phase = PHASE_LOCK
            else:
                self.arc += math.copysign(1.0, gap)
            self.pos = self.path.polyline.point_at(self.arc)
            return self.pos
        # Locked: the projection is non-expansive, so it stays within reach.
        if abs(target_s - self.arc) > 1.0 + t.tol.legal:
            self.phase = PHASE_CHASE
            return self.step(t, nav, evader)
        self.arc = target_s
        self.pos = self.path.polyline.point_at(self.arc)
        return self.pos

    def crossing_capture(self, t: Territory, e_old: Point, e_new: Point) -> bool:
        """A locked guard captures any move whose segment meets the path."""
        if self.phase != PHASE_LOCK:
            return False
        from shapely.geometry import LineString

        move = LineString([(e_old.x, e_old.y), (e_new.x, e_new.y)])
        line = LineString([(p.x, p.y) for p in self.path.polyline.vertices])
        return bool(move.distance(line) <= t.tol.capture)


# -- evader policies -----------------------------------------------------


@dataclass(frozen=True)
class GameView:
    """What an evader policy is allowed to see."""

    territory: Territory
    evader: Point
    pursuers: tuple[Point, ...]
    guarded_paths: tuple[Polyline, ...]
    turn: int


class EvaderPolicy(Protocol):
    def choose(self, view: GameView, rng) -> Point: ...


def _candidate_moves(view: GameView, rng, n_dirs: int = 16) -> list[Point]:
    t = view.territory
    e = view.evader
    jitter = rng.uniform(0.0, 2 * math.pi / n_dirs)
    margin = 64 * t.tol.cut_width
    out: list[Point] = [e]
    for i in range(n_dirs):
        ang = jitter + 2 * math.pi * i / n_dirs
        for step in (1.0, 0.45):
            cand = Point(e.x + step * math.cos(ang), e.y + step * math.sin(ang))
            if not t.graph.visible(e, cand):
                continue
            from shapely.geometry import Point as ShapelyPoint

            sp = ShapelyPoint(cand.x, cand.y)
            if t.polygon.boundary.distance(sp) < margin:
                continue
            out.append(cand)
    return out


def _min_pursuer_distance(view: GameView, p: Point) -> float:
    t = view.territory
    best = math.inf
    for q in view.pursuers:
        best = min(best, t.graph.distance_via_tree(q, p))
    return best


class StationaryPolicy:
    """Never moves; the baseline opponent."""

    def choose(self, view: GameView, rng) -> Point:
        return view.evader


class ScriptedPolicy:
    """Replays a fixed sequence of waypoints, then stays put."""

    def __init__(self, waypoints: list[Point]):
        self.waypoints = list(waypoints)
        self._i = 0

    def choose(self, view: GameView, rng) -> Point:
        while self._i < len(self.waypoints):
            target = self.waypoints[self._i]
            if view.evader.dist(target) <= 1e-9:
                self._i += 1
                continue
            return step_toward(view.territory.graph, view.evader, target)
        return view.evader


class RandomPolicy:
    """Uniformly random legal unit step."""

    def choose(self, view: GameView, rng) -> Point:
        cands = _candidate_moves(view, rng)
        return cands[rng.randrange(len(cands))]


class GreedyPolicy:
    """Maximizes the minimum geodesic distance to any pursuer."""

    def choose(self, view: GameView, rng) -> Point:
        cands = _candidate_moves(view, rng)
        best, best_score = cands[0], -math.inf
        for cand in cands:
            score = _min_pursuer_distance(view, cand)
            if score > best_score + 1e-12:
                best, best_score = cand, score
        return best


class AdversarialPolicy:
    """Presses against guarded cuts while staying away from pursuers.

    Designed to stress lock maintenance and ambiguous-side handling near
    territory boundaries.
    """

    def choose(self, view: GameView, rng) -> Point:
        cands = _candidate_moves(view, rng)
        best, best_score = cands[0], -math.inf
        for cand in cands:
            score = _min_pursuer_distance(view, cand)
            if view.guarded_paths:
                hug = min(pl.distance_to(cand) for pl in view.guarded_paths)
                score -= 0.5 * hug
            if score > best_score + 1e-12:
                best, best_score = cand, score
        return best


POLICIES = {
    "stationary": StationaryPolicy,
    "random": RandomPolicy,
    "greedy": GreedyPolicy,
    "adversarial": AdversarialPolicy,
}


def make_policy(name: str, **kwargs) -> EvaderPolicy:
    try:
        cls = POLICIES[name]
    except KeyError:
        raise ValueError(f"unknown policy {name!r}; options: {sorted(POLICIES)}")
    return cls(**kwargs)


def random_evader_start(t: Territory, rng) -> Point:
    return sample_free_point(t, rng, margin=64 * t.tol.cut_width)
