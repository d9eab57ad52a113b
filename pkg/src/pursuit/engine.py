"""Turn loop, capture detection, trace recording, replay, and bound checks.

A game alternates pursuer half-turns with evader moves. The engine owns
the planner state: it deploys the planned guard, cuts the territory when
the guard locks, and switches to the lion endgame once the territory is
simply connected. Traces are line-delimited JSON and replay bit-for-bit.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from typing import Optional, Union

from .environment import (
    Environment,
    EnvironmentError,
    EnvironmentMetrics,
    compute_metrics,
    validate_environment,
)
from .geodesic import GeodesicPath
from .geom import Point
from .homotopy import RaySystem
from .planner import (
    KIND_ENDGAME,
    RoundPlan,
    ThreatLedger,
    apply_round_outcome,
    plan_round,
    progress_metric,
)
from .strategy import (
    EvaderPolicy,
    GameView,
    GuardController,
    LionController,
    make_policy,
    reachable,
)
from .territory import AmbiguousSideError, initial_territory, sample_free_point
from .visibility import VisibilityGraph

STATUS_RUNNING = "running"
STATUS_CAPTURED = "captured"
STATUS_CAP_EXCEEDED = "cap_exceeded"

TRACE_VERSION = "1"


class IllegalMoveError(ValueError):
    pass


@dataclass
class Trace:
    header: dict
    records: list[dict] = field(default_factory=list)
    final: dict = field(default_factory=dict)

    @property
    def captured(self) -> bool:
        return self.final.get("status") == STATUS_CAPTURED

    @property
    def capture_turn(self) -> Optional[int]:
        return self.final.get("capture_turn")

    def to_jsonl(self) -> str:
        lines = [json.dumps(self.header)]
        lines.extend(json.dumps(r) for r in self.records)
        lines.append(json.dumps({"final": self.final}))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "Trace":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty trace")
        try:
            header = json.loads(lines[0])
        except json.JSONDecodeError as exc:
            raise ValueError(f"bad trace header: {exc}") from exc
        if not isinstance(header, dict) or "seed" not in header:
            raise ValueError("trace header missing required fields")
        records = []
        final: dict = {}
        for ln in lines[1:]:
            rec = json.loads(ln)
            if "final" in rec:
                final = rec["final"]
            else:
                records.append(rec)
        return cls(header, records, final)

    def state_hash(self) -> str:
        h = hashlib.sha256()
        for rec in self.records:
            h.update(
                json.dumps({"t": rec["t"], "p": rec["p"], "e": rec["e"]}).encode()
            )
        return h.hexdigest()


class Game:
    """One pursuit game; the service and the batch runner share this loop."""

    NAMES = ("P1", "P2", "P3")

    def __init__(
        self,
        env: Environment,
        seed: int,
        turn_cap: Optional[int] = None,
        metrics: Optional[EnvironmentMetrics] = None,
    ):
        report = validate_environment(env)
        if not report.ok:
            raise EnvironmentError("; ".join(report.violations))
        self.env = env
        self.metrics = metrics if metrics is not None else compute_metrics(env)
        self.tol = env.tolerances()
        self.nav = VisibilityGraph(env.free_space())
        self.seed = seed
        self.rng = random.Random(seed)
        self.rays = RaySystem(env.outer, dict(enumerate(env.obstacles)))
        self.t = initial_territory(env)
        self.ledger = ThreatLedger.initial(range(len(env.obstacles)))
        k = self.metrics.k
        diam = self.metrics.diameter
        if turn_cap is None:
            turn_cap = math.ceil(50.0 * (2 * k * diam + diam * diam))
        self.turn_cap = turn_cap
        self.turn = 0
        self.status = STATUS_RUNNING
        self.captured_by: Optional[str] = None
        self.evader: Optional[Point] = None
        self.guards: dict[str, GeodesicPath] = {}
        self.controllers: dict[str, Union[GuardController, LionController]] = {}
        self.plan: RoundPlan = plan_round(self.t, self.rays, self.ledger, {}, ["P1"])
        start = self.plan.path.start if self.plan.path is not None else Point(
            *self.env.outer.vertices[0]
        )
        self.positions: dict[str, Point] = {n: start for n in self.NAMES}
        self._deploy_plan([])

    # -- setup -----------------------------------------------------------

    def sample_evader_start(self) -> Point:
        best: Optional[Point] = None
        best_d = -math.inf
        anchor = self.positions["P1"]
        for _ in range(16):
            p = sample_free_point(self.t, self.rng, margin=64 * self.tol.cut_width)
            d = self.nav.distance_via_tree(anchor, p)
            if d > best_d:
                best, best_d = p, d
        assert best is not None
        return best

    def place_evader(self, p: Point) -> None:
        if self.evader is not None:
            raise IllegalMoveError("evader already placed")
        if not self.nav.contains(p):
            raise IllegalMoveError("placement outside free space")
        self.evader = p

    def view(self) -> GameView:
        locked = tuple(
            self.guards[n].polyline
            for n, c in self.controllers.items()
            if isinstance(c, GuardController) and c.locked
        )
        return GameView(
            territory=self.t,
            evader=self.evader,
            pursuers=tuple(self.positions[n] for n in self.NAMES),
            guarded_paths=locked,
            turn=self.turn,
        )

    def phases(self) -> dict[str, str]:
        out = {}
        for n in self.NAMES:
            c = self.controllers.get(n)
            out[n] = c.phase if c is not None else "idle"
        return out

    # -- pursuer half-turn ----------------------------------------------

    def _step_order(self) -> list[str]:
        guards = [
            n
            for n, c in self.controllers.items()
            if isinstance(c, GuardController) and n != self.plan.assigned
        ]
        order = guards + [self.plan.assigned]
        order += [n for n in self.NAMES if n not in order]
        return order

    def pursuer_half_turn(self) -> list[dict]:
        if self.status != STATUS_RUNNING or self.evader is None:
            return []
        self.turn += 1
        events: list[dict] = []
        for name in self._step_order():
            if reachable(self.nav, self.positions[name], self.evader, self.tol.capture):
                self.positions[name] = self.evader
                self.status = STATUS_CAPTURED
                self.captured_by = name
                events.append({"type": "captured", "by": name, "turn": self.turn})
                return events
            ctrl = self.controllers.get(name)
            if ctrl is None:
                continue
            if isinstance(ctrl, GuardController):
                was_locked = ctrl.locked
                self.positions[name] = ctrl.step(self.t, self.nav, self.evader)
                if ctrl.locked and not was_locked:
                    events.append({"type": "guard_locked", "guard": name})
                if (
                    name == self.plan.assigned
                    and self.plan.path is not None
                    and ctrl.locked
                ):
                    events.extend(self._try_cut())
            else:
                self.positions[name] = ctrl.step(self.t, self.nav, self.evader)
        return events

    def _try_cut(self) -> list[dict]:
        n_before = len(self.ledger.transitions)
        try:
            new_t, new_guards, released, removed = apply_round_outcome(
                self.t, self.rays, self.ledger, self.plan, self.evader, self.guards
            )
        except AmbiguousSideError:
            # The evader is on the path; the capture clause fires next turn.
            return [{"type": "cut_deferred"}]
        events: list[dict] = []
        for rnd, oid, old, new in self.ledger.transitions[n_before:]:
            events.append(
                {"type": "obstacle_transition", "id": oid, "from": old, "to": new}
            )
        self.t = new_t
        self.guards = new_guards
        for name, gp in new_guards.items():
            ctrl = self.controllers.get(name)
            if isinstance(ctrl, GuardController):
                ctrl.retarget(self.t, gp)
            else:
                self.controllers[name] = GuardController(
                    name, gp, self.positions[name]
                )
        for name in released:
            self.controllers.pop(name, None)
        events.append(
            {
                "type": "region_retyped",
                "region": self.t.region_type,
                "progress": list(self.progress()),
            }
        )
        self._plan_next(events)
        return events

    def _plan_next(self, events: list[dict]) -> None:
        free = [n for n in self.NAMES if n not in self.controllers]
        if not free:
            free = [n for n in self.NAMES if not getattr(self.controllers.get(n), "locked", False)]
        self.plan = plan_round(self.t, self.rays, self.ledger, self.guards, free)
        self._deploy_plan(events)

    def _deploy_plan(self, events: list[dict]) -> None:
        name = self.plan.assigned
        if self.plan.round_kind == KIND_ENDGAME:
            self.controllers[name] = LionController(
                center=self.plan.lion_center, pos=self.positions[name]
            )
            events.append({"type": "endgame", "lion": name})
            return
        self.controllers[name] = GuardController(
            name, self.plan.path, self.positions[name]
        )
        self.guards[name] = self.plan.path
        events.append(
            {
                "type": "path_guarded",
                "guard": name,
                "path": [[p.x, p.y] for p in self.plan.path.polyline.vertices],
            }
        )

    # -- evader half-turn ------------------------------------------------

    def apply_evader_move(self, target: Point) -> list[dict]:
        """Apply a policy move; must stay within the territory."""
        if self.status != STATUS_RUNNING:
            return []
        e = self.evader
        if e.dist(target) > 1.0 + self.tol.legal:
            raise IllegalMoveError("evader step exceeds unit distance")
        if not (
            self.t.graph.visible(e, target)
            or self.t.graph.distance_via_tree(e, target) <= 1.0 + self.tol.legal
        ):
            raise IllegalMoveError("evader move leaves the territory")
        self.evader = target
        return []

    def apply_human_move(self, target: Point) -> tuple[bool, str, list[dict]]:
        """Human moves are legal in the domain's free space.

        Crossing a locked guarded path is accepted; the locked guard
        then captures on the very next pursuer half-turn.
        """
        if self.status != STATUS_RUNNING:
            return False, "game over", []
        e = self.evader
        if e.dist(target) > 1.0 + self.tol.legal:
            return False, "distance exceeded", []
        if not self.nav.contains(target):
            return False, "out of bounds", []
        if not (
            self.nav.visible(e, target)
            or self.nav.distance_via_tree(e, target) <= 1.0 + self.tol.legal
        ):
            return False, "blocked", []
        events: list[dict] = []
        crossed = [
            n
            for n, c in self.controllers.items()
            if isinstance(c, GuardController) and c.crossing_capture(self.t, e, target)
        ]
        in_territory = self.t.graph.contains(target)
        if not crossed and not in_territory:
            return False, "blocked", []
        if crossed:
            events.append({"type": "path_crossed", "guards": crossed})
        self.evader = target
        return True, "", events

    def progress(self) -> tuple[int, int, int]:
        return progress_metric(self.ledger, self.t)


# -- batch entry points --------------------------------------------------


def run_game(
    env: Environment,
    policy: Union[str, EvaderPolicy],
    seed: int,
    turn_cap: Optional[int] = None,
    metrics: Optional[EnvironmentMetrics] = None,
) -> Trace:
    """Play one full game and return its trace."""
    game = Game(env, seed, turn_cap=turn_cap, metrics=metrics)
    policy_name = policy if isinstance(policy, str) else type(policy).__name__
    pol = make_policy(policy) if isinstance(policy, str) else policy
    game.place_evader(game.sample_evader_start())
    header = {
        "env": env.name,
        "seed": seed,
        "policy": policy_name,
        "version": TRACE_VERSION,
        "k": game.metrics.k,
        "diam": game.metrics.diameter,
        "turn_cap": game.turn_cap,
    }
    trace = Trace(header)
    trace.records.append(_record(game, []))
    while game.status == STATUS_RUNNING and game.turn < game.turn_cap:
        events = game.pursuer_half_turn()
        if game.status == STATUS_RUNNING:
            move = pol.choose(game.view(), game.rng)
            events.extend(game.apply_evader_move(move))
        trace.records.append(_record(game, events))
    if game.status == STATUS_CAPTURED:
        trace.final = {
            "status": STATUS_CAPTURED,
            "capture_turn": game.turn,
            "by": game.captured_by,
        }
    else:
        trace.final = {
            "status": STATUS_CAP_EXCEEDED,
            "turns": game.turn,
            "diagnostic": f"no capture within {game.turn_cap} turns",
        }
    return trace


def _record(game: Game, events: list[dict]) -> dict:
    rec = {
        "t": game.turn,
        "p": [[game.positions[n].x, game.positions[n].y] for n in game.NAMES],
        "e": [game.evader.x, game.evader.y],
        "phases": game.phases(),
        "region": game.t.region_type,
        "events": events,
    }
    if game.turn % 100 == 0:
        rec["snapshot"] = {
            "ledger": {str(k): v for k, v in game.ledger.states.items()},
            "round": game.ledger.round_no,
        }
    return rec


def check_bound(
    trace: Trace, metrics: EnvironmentMetrics, C: float
) -> tuple[bool, float, float]:
    """Capture-turn budget check; returns (ok, budget, margin)."""
    k = metrics.k
    diam = metrics.diameter
    budget = C * (2 * k * diam + diam * diam)
    if not trace.captured:
        return False, budget, -1.0
    turn = trace.capture_turn
    margin = (budget - turn) / budget
    return turn <= budget, budget, margin


@dataclass(frozen=True)
class ReplayReport:
    ok: bool
    divergence_turn: Optional[int] = None
    message: str = ""


def replay(trace: Trace, env: Environment) -> ReplayReport:
    """Re-simulate a trace from its seed and recorded evader moves.

    Pursuer responses are recomputed and must match bit-for-bit; move
    legality and ledger monotonicity are re-verified along the way.
    """
    try:
        seed = int(trace.header["seed"])
        cap = int(trace.header.get("turn_cap", 0)) or None
    except (KeyError, TypeError, ValueError) as exc:
        return ReplayReport(False, None, f"bad header: {exc}")
    if not trace.records:
        return ReplayReport(False, None, "trace has no records")
    game = Game(env, seed, turn_cap=cap)
    human = trace.header.get("policy") == "human"
    first = trace.records[0]
    game.place_evader(Point(first["e"][0], first["e"][1]))
    prev_e = game.evader
    for rec in trace.records[1:]:
        game.pursuer_half_turn()
        got = [[game.positions[n].x, game.positions[n].y] for n in game.NAMES]
        if got != rec["p"]:
            return ReplayReport(False, rec["t"], f"pursuer positions diverge: {got} != {rec['p']}")
        target = Point(rec["e"][0], rec["e"][1])
        if game.status == STATUS_RUNNING:
            if prev_e.dist(target) > 1.0 + game.tol.legal:
                return ReplayReport(False, rec["t"], "recorded evader move too long")
            if human:
                ok, reason, _ = game.apply_human_move(target)
                if not ok:
                    return ReplayReport(False, rec["t"], f"illegal recorded move: {reason}")
            else:
                try:
                    game.apply_evader_move(target)
                except IllegalMoveError as exc:
                    return ReplayReport(False, rec["t"], f"illegal recorded move: {exc}")
        prev_e = target
    status = trace.final.get("status")
    if status == STATUS_CAPTURED and game.status != STATUS_CAPTURED:
        return ReplayReport(False, None, "final capture status not reproduced")
    return ReplayReport(True)
