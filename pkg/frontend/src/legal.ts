/**
 * Client-side pre-validation of a clicked destination.
 *
 * The server is authoritative; this layer only avoids obviously doomed
 * round trips and implements the clamp-to-disk interaction. The legal
 * disk is the Euclidean unit circle about the evader: geodesic reach can
 * be smaller near obstacles, so a clamped click may still be rejected by
 * the server, and that rejection is surfaced inline.
 */

import type { Vec2 } from "./types.js";

export type ClickVerdict =
  | { kind: "submit"; target: Vec2 }
  | { kind: "clamped"; target: Vec2 }
  | { kind: "rejected"; reason: string };

export function dist(a: Vec2, b: Vec2): number {
  return Math.hypot(a[0] - b[0], a[1] - b[1]);
}

/** Ray-crossing point-in-polygon test; boundary points count as inside. */
export function pointInPolygon(p: Vec2, ring: Vec2[]): boolean {
  const [x, y] = p;
  let inside = false;
  for (let i = 0, j = ring.length - 1; i < ring.length; j = i++) {
    const [xi, yi] = ring[i]!;
    const [xj, yj] = ring[j]!;
    if (onSegment(p, ring[j]!, ring[i]!)) return true;
    const crosses =
      yi > y !== yj > y && x < ((xj - xi) * (y - yi)) / (yj - yi) + xi;
    if (crosses) inside = !inside;
  }
  return inside;
}

function onSegment(p: Vec2, a: Vec2, b: Vec2, eps = 1e-9): boolean {
  const ab = dist(a, b);
  if (ab === 0) return dist(p, a) <= eps;
  const cross =
    (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
  if (Math.abs(cross) / ab > eps) return false;
  const dot =
    (p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1]);
  return dot >= -eps && dot <= ab * ab + eps;
}

export interface LegalContext {
  evader: Vec2 | null;
  outer: Vec2[];
  obstacles: Vec2[][];
}

/**
 * Classify a click. Placement clicks (no evader yet) skip the disk rule.
 * Clicks farther than 1 are clamped to the disk boundary toward the
 * click and require confirmation; clicks inside an obstacle or outside
 * the arena are rejected locally.
 */
export function classifyClick(ctx: LegalContext, click: Vec2): ClickVerdict {
  let target = click;
  let clamped = false;
  if (ctx.evader !== null) {
    const d = dist(ctx.evader, click);
    if (d > 1) {
      const s = 1 / d;
      target = [
        ctx.evader[0] + (click[0] - ctx.evader[0]) * s,
        ctx.evader[1] + (click[1] - ctx.evader[1]) * s,
      ];
      clamped = true;
    }
  }
  if (!pointInPolygon(target, ctx.outer)) {
    return { kind: "rejected", reason: "outside the arena" };
  }
  for (const ring of ctx.obstacles) {
    if (pointInPolygon(target, ring)) {
      return { kind: "rejected", reason: "inside an obstacle" };
    }
  }
  return clamped
    ? { kind: "clamped", target }
    : { kind: "submit", target };
}
