/**
 * Browser entry point: wires the session client, store, renderer, and
 * click handling together. Renders are batched per animation frame.
 */

import { drawBoard, fitViewport, type DrawCtx } from "./board.js";
import { classifyClick } from "./legal.js";
import { SessionClient, SessionError } from "./net.js";
import type { SessionState, Vec2 } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export async function start(): Promise<void> {
  const canvas = el<HTMLCanvasElement>("board");
  const status = el<HTMLElement>("status");
  const ctx = canvas.getContext("2d") as unknown as DrawCtx;
  const params = new URLSearchParams(location.search);
  const client = await SessionClient.create(location.origin, {
    envName: params.get("env") ?? "env1",
    seed: Number(params.get("seed") ?? "0"),
  });

  let pending = false;
  const render = (state: SessionState) => {
    if (pending) return;
    pending = true;
    requestAnimationFrame(() => {
      pending = false;
      const vp = fitViewport(state, canvas.width, canvas.height);
      drawBoard(ctx, vp, state);
      status.textContent = `${state.status} | turn ${state.turn} | region ${state.region}`;
    });
  };
  client.store.subscribe(render);
  if (client.store.current) render(client.store.current);

  const toWorld = (ev: MouseEvent): Vec2 => {
    const state = client.store.current;
    if (!state) return [0, 0];
    const vp = fitViewport(state, canvas.width, canvas.height);
    const rect = canvas.getBoundingClientRect();
    const origin = vp.toScreen([0, 0]);
    const unit = vp.toScreen([1, 1]);
    const sx = ev.clientX - rect.left;
    const sy = ev.clientY - rect.top;
    return [
      (sx - origin[0]) / (unit[0] - origin[0]),
      (sy - origin[1]) / (unit[1] - origin[1]),
    ];
  };

  canvas.addEventListener("click", (ev) => {
    const state = client.store.current;
    if (!state || (state.status !== "running" && state.status !== "awaiting_placement")) {
      return;
    }
    const verdict = classifyClick(
      {
        evader: state.evader,
        outer: state.environment.outer,
        obstacles: state.environment.obstacles,
      },
      toWorld(ev),
    );
    if (verdict.kind === "rejected") {
      status.textContent = `move rejected: ${verdict.reason}`;
      return;
    }
    if (verdict.kind === "clamped") {
      const ok = window.confirm(
        "Click is outside the unit disk; move to the clamped boundary point?",
      );
      if (!ok) return;
    }
    void client
      .submitMove(verdict.target[0], verdict.target[1])
      .catch((err: unknown) => {
        if (err instanceof SessionError) {
          status.textContent = `server rejected: ${err.message}`;
        } else {
          status.textContent = "network error; retrying sync";
          void client.resync();
        }
      });
  });
}

if (typeof document !== "undefined" && document.getElementById("board")) {
  void start();
}
