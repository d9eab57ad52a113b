/**
 * End-to-end scripted session against the real game server.
 *
 * Plays the evader for exactly 20 clicked moves in env1: evasive moves
 * while a guard locks onto its path, then a deliberate run across the
 * locked guarded path, timed so the crossing lands on move 20. Crossing
 * a locked path is punished on the following pursuer half-turn, so the
 * response to the final click carries the captured event. The exported
 * trace is then verified by the server's replay checker.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { WebSocket } from "ws";

import { classifyClick } from "../src/legal.js";
import { SessionClient, SessionError } from "../src/net.js";
import type { GuardedPath, SessionState, Vec2 } from "../src/types.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

beforeAll(async () => {
  server = spawn(
    "python3",
    [
      "-c",
      "import uvicorn; from pursuit.service import create_app; " +
        `uvicorn.run(create_app(), host='127.0.0.1', port=${PORT}, log_level='warning')`,
    ],
    { stdio: ["ignore", "inherit", "inherit"] },
  );
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const res = await fetch(`${BASE}/sessions/probe/state`);
      if (res.status === 404) return;
    } catch {
      /* not up yet */
    }
    if (Date.now() > deadline) throw new Error("server did not start");
    await new Promise((r) => setTimeout(r, 200));
  }
}, 40_000);

afterAll(() => {
  server.kill("SIGKILL");
});

function dist(a: Vec2, b: Vec2): number {
  return Math.hypot(a[0] - b[0], a[1] - b[1]);
}

function closestOnPath(p: Vec2, poly: Vec2[]): { point: Vec2; d: number } {
  let best: Vec2 = poly[0]!;
  let bd = Infinity;
  for (let i = 0; i + 1 < poly.length; i++) {
    const [ax, ay] = poly[i]!;
    const [bx, by] = poly[i + 1]!;
    const dx = bx - ax;
    const dy = by - ay;
    const l2 = dx * dx + dy * dy;
    const t = l2 === 0 ? 0 : Math.max(0, Math.min(1, ((p[0] - ax) * dx + (p[1] - ay) * dy) / l2));
    const q: Vec2 = [ax + t * dx, ay + t * dy];
    const d = dist(p, q);
    if (d < bd) {
      bd = d;
      best = q;
    }
  }
  return { point: best, d: bd };
}

function lockedPaths(state: SessionState): GuardedPath[] {
  return state.guarded_paths.filter((g) => g.phase === "lock");
}

/** Candidate clicks ranked like a cautious human: stay legal, stay far
 * from every pursuer, and keep a margin from locked paths. */
function evasiveClicks(state: SessionState): Vec2[] {
  const e = state.evader!;
  const out: { click: Vec2; score: number }[] = [];
  for (let i = 0; i < 16; i++) {
    const ang = (2 * Math.PI * i) / 16;
    for (const step of [0.98, 0.5, 0]) {
      const c: Vec2 = [e[0] + step * Math.cos(ang), e[1] + step * Math.sin(ang)];
      const verdict = classifyClick(
        { evader: e, outer: state.environment.outer, obstacles: state.environment.obstacles },
        c,
      );
      if (verdict.kind === "rejected") continue;
      const t = verdict.target;
      if (lockedPaths(state).some((g) => closestOnPath(t, g.polyline).d < 1.3)) continue;
      const score = Math.min(
        ...Object.values(state.pursuers).map((p) => dist(t, p)),
      );
      out.push({ click: t, score });
    }
  }
  out.sort((a, b) => b.score - a.score);
  return out.map((o) => o.click);
}

describe("scripted human session", () => {
  it(
    "20 moves with a deliberate crossing end in capture and a replayable trace",
    async () => {
      const client = await SessionClient.create(BASE, {
        envName: "env1",
        seed: 0,
        webSocket: WebSocket as never,
      });
      const wsEvents: string[] = [];
      client.store.subscribe((_s, events) => {
        for (const ev of events) wsEvents.push(ev.type);
      });

      // Placement click, then exactly 20 moves.
      await client.submitMove(2, 8);
      expect(client.store.current?.turn).toBe(1);

      let moves = 0;
      let crossedOnMove: number | null = null;
      while (!client.store.captured && moves < 40) {
        const state = client.store.current!;
        const e = state.evader!;
        const locked = lockedPaths(state);
        let clicks: Vec2[];
        let plunging = false;
        if (locked.length > 0 && moves >= 19) {
          // Deliberate crossing: click past the locked path; the clamp
          // keeps the submitted move legal, so the run across takes a
          // few clicks and ends in the guard's capture.
          plunging = true;
          const { point, d } = closestOnPath(e, locked[0]!.polyline);
          const ux = (point[0] - e[0]) / d;
          const uy = (point[1] - e[1]) / d;
          const raw: Vec2 = [e[0] + ux * (d + 0.5), e[1] + uy * (d + 0.5)];
          const verdict = classifyClick(
            { evader: e, outer: state.environment.outer, obstacles: state.environment.obstacles },
            raw,
          );
          expect(verdict.kind).not.toBe("rejected");
          clicks = verdict.kind === "rejected" ? [] : [verdict.target];
        } else {
          clicks = evasiveClicks(state);
        }
        let applied = false;
        for (const target of clicks) {
          try {
            const delta = await client.submitMove(target[0], target[1]);
            applied = true;
            moves += 1;
            if (plunging && crossedOnMove === null) crossedOnMove = moves;
            if (delta.events.some((ev) => ev.type === "captured")) {
              expect(plunging).toBe(true);
            }
            break;
          } catch (err) {
            if (err instanceof SessionError && err.status === 422) continue;
            throw err;
          }
        }
        expect(applied).toBe(true);
      }

      expect(moves).toBeGreaterThanOrEqual(20);
      expect(client.store.captured).toBe(true);
      expect(crossedOnMove).not.toBeNull();
      expect(crossedOnMove!).toBeGreaterThanOrEqual(20);
      // The capture arrived over the WebSocket feed as well.
      await new Promise((r) => setTimeout(r, 300));
      expect(wsEvents).toContain("captured");

      // Exported trace passes the engine's replay verification.
      const trace = await client.trace();
      expect(trace.split("\n")[0]).toContain('"policy": "human"');
      const check = spawnSync(
        "python3",
        [
          "-c",
          [
            "import sys",
            "from pursuit.engine import Trace, replay",
            "from pursuit.service import _preset",
            "trace = Trace.from_jsonl(sys.stdin.read())",
            "rep = replay(trace, _preset('env1'))",
            "print(rep.message if not rep.ok else 'replay ok')",
            "sys.exit(0 if rep.ok else 1)",
          ].join("\n"),
        ],
        { input: trace, encoding: "utf-8" },
      );
      expect(check.stdout.trim()).toBe("replay ok");
      expect(check.status).toBe(0);

      client.close();
    },
    120_000,
  );
});
