"""Round planning, territory outcomes, and the threat ledger."""

import math

import pytest

from pursuit.geom import Point
from pursuit.homotopy import RaySystem
from pursuit.planner import (
    DANGEROUS,
    KIND_ENDGAME,
    KIND_INIT,
    KIND_TYPE1,
    KIND_TYPE2,
    REMOVED,
    SAFE,
    LedgerError,
    RoundPlan,
    ThreatLedger,
    apply_round_outcome,
    plan_initialization,
    plan_round,
    progress_metric,
)
from pursuit.territory import REGION_0, REGION_1, REGION_1P, REGION_2, initial_territory


def _setup(env):
    t = initial_territory(env)
    rays = RaySystem(env.outer, dict(enumerate(env.obstacles)))
    return t, rays


class TestLedger:
    def test_initial_all_dangerous(self):
        led = ThreatLedger.initial([0, 1])
        assert led.states == {0: DANGEROUS, 1: DANGEROUS}
        assert led.count(DANGEROUS) == 2

    def test_forward_transitions_recorded(self):
        led = ThreatLedger.initial([0])
        assert led.mark(0, SAFE)
        led.round_no = 2
        assert led.mark(0, REMOVED)
        assert led.transitions == [(0, 0, DANGEROUS, SAFE), (2, 0, SAFE, REMOVED)]

    def test_same_state_is_noop(self):
        led = ThreatLedger.initial([0])
        led.mark(0, SAFE)
        assert not led.mark(0, SAFE)
        assert len(led.transitions) == 1

    def test_backward_transition_rejected(self):
        led = ThreatLedger.initial([0])
        led.mark(0, REMOVED)
        with pytest.raises(LedgerError):
            led.mark(0, SAFE)

    def test_transition_cap_two_per_obstacle(self):
        """Each obstacle moves through at most two forward transitions."""
        led = ThreatLedger.initial(range(5))
        for oid in range(5):
            led.mark(oid, SAFE)
            led.mark(oid, REMOVED)
        assert len(led.transitions) <= 2 * 5


class TestInitialization:
    def test_env1_perimeter_bisection(self, env1):
        """The first chord joins (0,0) to (10,10) through the lower corner."""
        t, rays = _setup(env1)
        plan = plan_initialization(t, rays, "P1")
        assert plan.round_kind == KIND_INIT
        assert plan.assigned == "P1"
        assert plan.path.start == Point(0, 0)
        assert plan.path.end == Point(10, 10)
        assert abs(plan.path.length - 2 * math.sqrt(52.0)) <= 1e-9
        assert [tuple(v) for v in plan.path.polyline.vertices[1:-1]] == [(6.0, 4.0)]

    def test_region_init_routes_to_init(self, env1):
        t, rays = _setup(env1)
        led = ThreatLedger.initial([0])
        plan = plan_round(t, rays, led, {}, ["P1"])
        assert plan.round_kind == KIND_INIT


class TestRoundFlow:
    def _first_cut(self, env, evader):
        t, rays = _setup(env)
        led = ThreatLedger.initial(range(len(env.obstacles)))
        plan = plan_round(t, rays, led, {}, ["P1", "P2", "P3"])
        t2, guards, released, removed = apply_round_outcome(
            t, rays, led, plan, evader, {}
        )
        return t2, rays, led, guards, released, removed

    def test_cut_keeps_obstacle_side(self, env1):
        t2, rays, led, guards, released, removed = self._first_cut(env1, Point(2, 8))
        assert removed == []
        assert t2.region_type in (REGION_1, REGION_1P)
        assert set(guards) == {"P1"}
        assert released == []
        assert led.states[0] == SAFE
        assert led.round_no == 1

    def test_cut_pocket_side_removes_obstacle(self, env1):
        """When the evader hides in an empty pocket the obstacle is gone and
        the region becomes an endgame arena."""
        t2, rays, led, guards, released, removed = self._first_cut(env1, Point(9, 1))
        assert removed == [0]
        assert led.states[0] == REMOVED
        assert t2.region_type == REGION_0

    def test_split_round_after_first_cut(self, env1):
        t2, rays, led, guards, _, _ = self._first_cut(env1, Point(2, 8))
        plan = plan_round(t2, rays, led, guards, ["P2", "P3"])
        assert plan.round_kind == KIND_TYPE1
        assert plan.assigned == "P2"
        # The split path starts at a junction of the guarded boundary.
        assert plan.path is not None
        assert t2.polygon.exterior.distance(
            __import__("shapely.geometry", fromlist=["Point"]).Point(
                plan.path.end.x, plan.path.end.y
            )
        ) <= 1e-6

    def test_split_cut_reaches_endgame(self, env1):
        t2, rays, led, guards, _, _ = self._first_cut(env1, Point(2, 8))
        evader = Point(2, 8)
        for _ in range(4):
            if t2.region_type == REGION_0:
                break
            free = [n for n in ("P1", "P2", "P3") if n not in guards]
            plan = plan_round(t2, rays, led, guards, free)
            if plan.round_kind == KIND_ENDGAME:
                break
            if not t2.contains(evader):
                evader = Point(2.0, 8.5)
            t2, guards, released, removed = apply_round_outcome(
                t2, rays, led, plan, evader, guards
            )
        assert led.states[0] in (SAFE, REMOVED)
        assert t2.region_type == REGION_0 or led.count(DANGEROUS) == 0

    def test_endgame_plan(self, env0):
        t, rays = _setup(env0)
        led = ThreatLedger.initial([])
        from pursuit.territory import cut_territory
        from pursuit.geom import Polyline

        diag = Polyline((Point(0, 0), Point(10, 10)))
        t2, _ = cut_territory(t, diag, Point(2, 8), {"P1": diag}, "P1")
        plan = plan_round(t2, rays, led, {}, ["P2"])
        assert plan.round_kind == KIND_ENDGAME
        assert plan.path is None
        assert plan.lion_center is not None

    def test_type2_round_plans_third_path(self, env2):
        t, rays = _setup(env2)
        led = ThreatLedger.initial([0, 1])
        from pursuit.geodesic import make_path
        from pursuit.geom import Polyline

        lo = make_path(
            t, rays, Polyline((Point(0, 0), Point(7, 4), Point(16, 11), Point(20, 20)))
        )
        hi = make_path(
            t, rays, Polyline((Point(0, 0), Point(4, 7), Point(12, 15), Point(20, 20)))
        )
        t1, g1, _, _ = apply_round_outcome(
            t, rays, led, RoundPlan(KIND_TYPE1, lo, "P1"), Point(4, 12), {}
        )
        t2, g2, _, _ = apply_round_outcome(
            t1, rays, led, RoundPlan(KIND_TYPE1, hi, "P2"), Point(8, 9), g1
        )
        assert t2.region_type == REGION_2
        plan = plan_round(t2, rays, led, g2, ["P3"])
        assert plan.round_kind == KIND_TYPE2
        assert plan.path is not None
        # The separating chord removes one lobe and frees one guard.
        t3, g3, released, removed = apply_round_outcome(
            t2, rays, led, plan, Point(8, 9), g2
        )
        assert len(removed) == 1
        assert len(released) == 1
        assert led.states[removed[0]] == REMOVED

    def test_no_free_pursuer_raises(self, env1):
        t2, rays, led, guards, _, _ = self._first_cut(env1, Point(2, 8))
        with pytest.raises(ValueError):
            plan_round(t2, rays, led, guards, [])


class TestProgress:
    def test_metric_strictly_decreases(self, env1):
        t, rays = _setup(env1)
        led = ThreatLedger.initial([0])
        history = [progress_metric(led, t)]
        guards = {}
        evader = Point(2, 8)
        for _ in range(6):
            if t.region_type == REGION_0:
                break
            free = [n for n in ("P1", "P2", "P3") if n not in guards]
            plan = plan_round(t, rays, led, guards, free)
            if plan.round_kind == KIND_ENDGAME:
                break
            if not t.contains(evader):
                evader = Point(2.0, 8.5)
            t, guards, _, _ = apply_round_outcome(t, rays, led, plan, evader, guards)
            history.append(progress_metric(led, t))
        for a, b in zip(history, history[1:]):
            assert b <= a
        assert history[-1][0] == 0
