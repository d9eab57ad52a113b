/**
 * Wire types for the game server's HTTP+WebSocket JSON payloads.
 *
 * Everything the board renders derives from these payloads; the client
 * never computes game state on its own.
 */

export type Vec2 = [number, number];

export type SessionStatus =
  | "awaiting_placement"
  | "running"
  | "captured"
  | "cap_exceeded";

export type GuardPhase = "reach" | "chase" | "lock" | "idle";

export type ObstacleThreat = "dangerous" | "safe" | "removed";

export interface GuardedPath {
  guard: string;
  phase: GuardPhase;
  polyline: Vec2[];
}

export interface EnvironmentView {
  name: string;
  outer: Vec2[];
  obstacles: Vec2[][];
}

export interface SessionState {
  session_id: string;
  status: SessionStatus;
  turn: number;
  pursuers: Record<string, Vec2>;
  evader: Vec2 | null;
  phases: Record<string, string>;
  region: string;
  guarded_paths: GuardedPath[];
  ledger: Record<string, ObstacleThreat>;
  territory: Vec2[];
  environment: EnvironmentView;
}

export interface GameEvent {
  type: string;
  [key: string]: unknown;
}

/** One move's response: the full state plus the events that produced it. */
export interface Delta extends SessionState {
  accepted: boolean;
  events: GameEvent[];
}
