/**
 * Canvas renderer for the board.
 *
 * Pure drawing: everything comes from the last server state, nothing is
 * computed client-side beyond coordinate transforms. The legal-move disk
 * is the Euclidean unit circle about the evader clipped to the territory
 * polygon reported by the server.
 */

import type { GuardPhase, SessionState, Vec2 } from "./types.js";

/** The subset of CanvasRenderingContext2D the renderer needs. */
export interface DrawCtx {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  globalAlpha: number;
  save(): void;
  restore(): void;
  beginPath(): void;
  closePath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  stroke(): void;
  clip(): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
}

export interface Viewport {
  width: number;
  height: number;
  /** World-to-screen transform; y is flipped so world +y points up. */
  toScreen(p: Vec2): Vec2;
  scale: number;
}

/** Fit the environment's bounding box into a canvas with a margin. */
export function fitViewport(
  state: SessionState,
  width: number,
  height: number,
  margin = 20,
): Viewport {
  const xs = state.environment.outer.map((p) => p[0]);
  const ys = state.environment.outer.map((p) => p[1]);
  const minX = Math.min(...xs);
  const maxX = Math.max(...xs);
  const minY = Math.min(...ys);
  const maxY = Math.max(...ys);
  const scale = Math.min(
    (width - 2 * margin) / Math.max(maxX - minX, 1e-9),
    (height - 2 * margin) / Math.max(maxY - minY, 1e-9),
  );
  return {
    width,
    height,
    scale,
    toScreen: ([x, y]) => [
      margin + (x - minX) * scale,
      height - margin - (y - minY) * scale,
    ],
  };
}

const PHASE_COLORS: Record<GuardPhase, string> = {
  reach: "#8a8ad0",
  chase: "#d0a030",
  lock: "#d04040",
  idle: "#999999",
};

const THREAT_COLORS: Record<string, string> = {
  dangerous: "#c03030",
  safe: "#d8a020",
  removed: "#b0b0b0",
};

function tracePath(ctx: DrawCtx, vp: Viewport, ring: Vec2[], close: boolean) {
  ctx.beginPath();
  ring.forEach((p, i) => {
    const [sx, sy] = vp.toScreen(p);
    if (i === 0) ctx.moveTo(sx, sy);
    else ctx.lineTo(sx, sy);
  });
  if (close) ctx.closePath();
}

export function drawBoard(ctx: DrawCtx, vp: Viewport, state: SessionState): void {
  ctx.clearRect(0, 0, vp.width, vp.height);
  // Arena and evader territory.
  tracePath(ctx, vp, state.environment.outer, true);
  ctx.fillStyle = "#f4f4f0";
  ctx.fill();
  ctx.strokeStyle = "#333333";
  ctx.lineWidth = 2;
  ctx.stroke();
  if (state.territory.length >= 3) {
    tracePath(ctx, vp, state.territory, true);
    ctx.fillStyle = "#e2efe2";
    ctx.fill();
  }
  // Obstacles with threat badges.
  state.environment.obstacles.forEach((ring, i) => {
    const threat = state.ledger[String(i)] ?? "dangerous";
    tracePath(ctx, vp, ring, true);
    ctx.fillStyle = THREAT_COLORS[threat] ?? "#c03030";
    ctx.globalAlpha = threat === "removed" ? 0.25 : 0.8;
    ctx.fill();
    ctx.globalAlpha = 1;
    ctx.strokeStyle = "#222222";
    ctx.lineWidth = 1;
    ctx.stroke();
    const cx = ring.reduce((s, p) => s + p[0], 0) / ring.length;
    const cy = ring.reduce((s, p) => s + p[1], 0) / ring.length;
    const [sx, sy] = vp.toScreen([cx, cy]);
    ctx.fillStyle = "#ffffff";
    ctx.fillText(threat, sx, sy);
  });
  // Guarded paths colored by guard phase.
  for (const gp of state.guarded_paths) {
    tracePath(ctx, vp, gp.polyline, false);
    ctx.strokeStyle = PHASE_COLORS[gp.phase] ?? "#999999";
    ctx.lineWidth = gp.phase === "lock" ? 4 : 2;
    ctx.stroke();
  }
  // Legal-move disk, clipped to the territory.
  if (state.evader !== null && state.status === "running") {
    ctx.save();
    if (state.territory.length >= 3) {
      tracePath(ctx, vp, state.territory, true);
      ctx.clip();
    }
    const [ex, ey] = vp.toScreen(state.evader);
    ctx.beginPath();
    ctx.arc(ex, ey, vp.scale, 0, 2 * Math.PI);
    ctx.fillStyle = "#60a060";
    ctx.globalAlpha = 0.2;
    ctx.fill();
    ctx.globalAlpha = 1;
    ctx.restore();
  }
  // Agents.
  for (const [name, pos] of Object.entries(state.pursuers)) {
    const [sx, sy] = vp.toScreen(pos);
    ctx.beginPath();
    ctx.arc(sx, sy, 6, 0, 2 * Math.PI);
    ctx.fillStyle = "#3050c0";
    ctx.fill();
    ctx.fillStyle = "#222222";
    ctx.fillText(name, sx + 8, sy - 8);
  }
  if (state.evader !== null) {
    const [sx, sy] = vp.toScreen(state.evader);
    ctx.beginPath();
    ctx.arc(sx, sy, 6, 0, 2 * Math.PI);
    ctx.fillStyle = "#20a020";
    ctx.fill();
  } else {
    ctx.fillStyle = "#444444";
    ctx.fillText("click to place the evader", 12, 18);
  }
  if (state.status === "captured") {
    ctx.fillStyle = "#c03030";
    ctx.fillText(`captured on turn ${state.turn}`, 12, 18);
  }
}
