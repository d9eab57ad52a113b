/**
 * Single source of truth for the board.
 *
 * Deltas arrive in server order (HTTP responses and the WebSocket feed
 * carry the same payload); the store applies whichever it sees first and
 * drops stale duplicates by turn number. Everything the renderer needs
 * is read from here, never from the network layer directly.
 */

import type { Delta, GameEvent, SessionState } from "./types.js";

export type Listener = (state: SessionState, events: GameEvent[]) => void;

export class GameStore {
  private state: SessionState | null = null;
  private listeners: Listener[] = [];
  /** Events from every applied delta, oldest first. */
  readonly eventLog: GameEvent[] = [];

  get current(): SessionState | null {
    return this.state;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  /** Replace the state wholesale (initial load or reconnect resync). */
  resync(state: SessionState): void {
    this.state = state;
    this.emit([]);
  }

  /** Apply a delta unless it is older than what we already show. */
  apply(delta: Delta): boolean {
    if (this.state !== null && delta.turn < this.state.turn) {
      return false;
    }
    const duplicate = this.state !== null && delta.turn === this.state.turn
      && this.state.status === delta.status;
    const { accepted: _a, events, ...state } = delta;
    this.state = state;
    if (duplicate) return false;
    this.eventLog.push(...events);
    this.emit(events);
    return true;
  }

  /** True once the server reported a capture. */
  get captured(): boolean {
    return this.state?.status === "captured";
  }

  private emit(events: GameEvent[]): void {
    if (this.state === null) return;
    for (const fn of this.listeners) fn(this.state, events);
  }
}
