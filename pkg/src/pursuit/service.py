"""HTTP+WebSocket session host for interactive play.

The human plays the evader: the first move places it, every later move
is validated server-side and answered with a full pursuer half-turn.
Completed sessions export a standard trace that passes replay.
"""

from __future__ import annotations

import asyncio
import uuid
from typing import Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from pydantic import BaseModel

from .engine import STATUS_RUNNING, Game, Trace, TRACE_VERSION, _record
from .environment import (
    Environment,
    EnvironmentError,
    EnvironmentParseError,
    load_environment,
)
from .geom import Point, Polygon


def _preset(name: str) -> Environment:
    square = Polygon((Point(0, 0), Point(10, 0), Point(10, 10), Point(0, 10)))
    if name == "env0":
        return Environment(outer=square, name="env0")
    if name == "env1":
        block = Polygon((Point(4, 4), Point(6, 4), Point(6, 6), Point(4, 6)))
        return Environment(outer=square, obstacles=(block,), name="env1")
    raise KeyError(name)


class CreateSessionRequest(BaseModel):
    env_name: Optional[str] = None
    env: Optional[dict] = None
    seed: int = 0
    turn_cap: Optional[int] = None


class MoveRequest(BaseModel):
    x: float
    y: float


class _Session:
    def __init__(self, sid: str, env: Environment, seed: int, turn_cap: Optional[int]):
        self.id = sid
        self.env = env
        self.game = Game(env, seed, turn_cap=turn_cap)
        self.lock = asyncio.Lock()
        self.subscribers: list[asyncio.Queue] = []
        self.trace = Trace(
            {
                "env": env.name,
                "seed": seed,
                "policy": "human",
                "version": TRACE_VERSION,
                "k": self.game.metrics.k,
                "diam": self.game.metrics.diameter,
                "turn_cap": self.game.turn_cap,
            }
        )
        self.pending_events: list[dict] = []

    @property
    def awaiting_placement(self) -> bool:
        return self.game.evader is None

    def state(self) -> dict:
        g = self.game
        return {
            "session_id": self.id,
            "status": "awaiting_placement" if self.awaiting_placement else g.status,
            "turn": g.turn,
            "pursuers": {n: [g.positions[n].x, g.positions[n].y] for n in g.NAMES},
            "evader": [g.evader.x, g.evader.y] if g.evader else None,
            "phases": g.phases(),
            "region": g.t.region_type,
            "guarded_paths": self._guarded_paths(),
            "ledger": {str(k): v for k, v in g.ledger.states.items()},
            "territory": [[p.x, p.y] for p in g.t.boundary_loop().vertices],
            "environment": {
                "name": self.env.name,
                "outer": [[p.x, p.y] for p in self.env.outer.vertices],
                "obstacles": [
                    [[p.x, p.y] for p in ob.vertices] for ob in self.env.obstacles
                ],
            },
        }

    def _guarded_paths(self) -> list[dict]:
        out = []
        for name, gp in self.game.guards.items():
            ctrl = self.game.controllers.get(name)
            out.append(
                {
                    "guard": name,
                    "phase": getattr(ctrl, "phase", "idle"),
                    "polyline": [[p.x, p.y] for p in gp.polyline.vertices],
                }
            )
        return out

    def place(self, target: Point) -> dict:
        g = self.game
        try:
            g.place_evader(target)
        except Exception as exc:
            raise HTTPException(422, detail=f"rejected: {exc}")
        self.trace.records.append(_record(g, [{"type": "evader_placed"}]))
        events = g.pursuer_half_turn()
        self.pending_events = events
        self._maybe_finalize(events)
        return self._delta(events, accepted=True)

    def move(self, target: Point) -> dict:
        g = self.game
        if g.status != STATUS_RUNNING:
            raise HTTPException(409, detail="game over")
        ok, reason, move_events = g.apply_human_move(target)
        if not ok:
            raise HTTPException(422, detail=f"rejected: {reason}")
        self.trace.records.append(_record(g, self.pending_events + move_events))
        events = g.pursuer_half_turn()
        self.pending_events = events
        self._maybe_finalize(events)
        return self._delta(move_events + events, accepted=True)

    def _maybe_finalize(self, events: list[dict]) -> None:
        g = self.game
        if g.status != STATUS_RUNNING:
            self.trace.records.append(_record(g, events))
            self.trace.final = {
                "status": g.status,
                "capture_turn": g.turn if g.captured_by else None,
                "by": g.captured_by,
            }

    def _delta(self, events: list[dict], accepted: bool) -> dict:
        delta = {"accepted": accepted, "events": events, **self.state()}
        for q in self.subscribers:
            q.put_nowait(delta)
        return delta


def create_app(default_env: Optional[Environment] = None) -> FastAPI:
    app = FastAPI(title="pursuit")
    sessions: dict[str, _Session] = {}

    def _get(sid: str) -> _Session:
        s = sessions.get(sid)
        if s is None:
            raise HTTPException(404, detail="unknown session")
        return s

    @app.post("/sessions")
    async def create_session(req: CreateSessionRequest):
        try:
            if req.env is not None:
                import json

                env = load_environment(json.dumps(req.env))
            elif req.env_name is not None:
                env = _preset(req.env_name)
            elif default_env is not None:
                env = default_env
            else:
                raise HTTPException(422, detail="validation: no environment given")
            sid = uuid.uuid4().hex[:12]
            session = _Session(sid, env, req.seed, req.turn_cap)
        except (EnvironmentParseError, EnvironmentError, KeyError) as exc:
            raise HTTPException(422, detail=f"validation: {exc}")
        sessions[sid] = session
        return session.state()

    @app.get("/sessions/{sid}/state")
    async def get_state(sid: str):
        return _get(sid).state()

    @app.post("/sessions/{sid}/evader-move")
    async def evader_move(sid: str, req: MoveRequest):
        session = _get(sid)
        async with session.lock:
            target = Point(req.x, req.y)
            if session.awaiting_placement:
                return session.place(target)
            return session.move(target)

    @app.get("/sessions/{sid}/trace")
    async def get_trace(sid: str):
        from fastapi.responses import PlainTextResponse

        session = _get(sid)
        trace = session.trace
        if not trace.final:
            trace = Trace(trace.header, trace.records, {"status": session.game.status})
        return PlainTextResponse(trace.to_jsonl(), media_type="application/jsonl")

    @app.websocket("/sessions/{sid}/events")
    async def events(ws: WebSocket, sid: str):
        session = sessions.get(sid)
        await ws.accept()
        if session is None:
            await ws.close(code=4404)
            return
        queue: asyncio.Queue = asyncio.Queue()
        session.subscribers.append(queue)
        try:
            while True:
                delta = await queue.get()
                await ws.send_json(delta)
        except WebSocketDisconnect:
            pass
        finally:
            session.subscribers.remove(queue)

    return app
