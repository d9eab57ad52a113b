/**
 * Thin session client over the game server's HTTP+WebSocket interface.
 *
 * All state mutation goes through submitMove; the WebSocket only feeds
 * the store. On connection loss the client reconnects with exponential
 * backoff and resyncs via the state endpoint so no delta is missed.
 */

import { GameStore } from "./state.js";
import type { Delta, SessionState } from "./types.js";

type WebSocketCtor = new (url: string) => {
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
  close(): void;
};

export interface SessionOptions {
  envName?: string;
  env?: unknown;
  seed?: number;
  /** WebSocket implementation; defaults to the browser global. */
  webSocket?: WebSocketCtor;
  fetchFn?: typeof fetch;
}

export class SessionError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

export class SessionClient {
  readonly store = new GameStore();
  private ws: InstanceType<WebSocketCtor> | null = null;
  private closed = false;
  private backoffMs = 250;

  private constructor(
    private readonly baseUrl: string,
    readonly sessionId: string,
    private readonly wsCtor: WebSocketCtor | null,
    private readonly fetchFn: typeof fetch,
  ) {}

  static async create(
    baseUrl: string,
    opts: SessionOptions = {},
  ): Promise<SessionClient> {
    const fetchFn = opts.fetchFn ?? fetch;
    const res = await fetchFn(`${baseUrl}/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        env_name: opts.envName ?? null,
        env: opts.env ?? null,
        seed: opts.seed ?? 0,
      }),
    });
    if (!res.ok) {
      throw new SessionError(res.status, await detail(res));
    }
    const state = (await res.json()) as SessionState;
    const wsCtor =
      opts.webSocket ??
      ((globalThis as { WebSocket?: WebSocketCtor }).WebSocket ?? null);
    const client = new SessionClient(baseUrl, state.session_id, wsCtor, fetchFn);
    client.store.resync(state);
    client.connect();
    return client;
  }

  /** Submit a placement or move; resolves with the applied delta. */
  async submitMove(x: number, y: number): Promise<Delta> {
    const res = await this.fetchFn(
      `${this.baseUrl}/sessions/${this.sessionId}/evader-move`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ x, y }),
      },
    );
    if (!res.ok) {
      throw new SessionError(res.status, await detail(res));
    }
    const delta = (await res.json()) as Delta;
    this.store.apply(delta);
    return delta;
  }

  async resync(): Promise<void> {
    const res = await this.fetchFn(
      `${this.baseUrl}/sessions/${this.sessionId}/state`,
    );
    if (res.ok) {
      this.store.resync((await res.json()) as SessionState);
    }
  }

  /** Download the session trace as JSONL text. */
  async trace(): Promise<string> {
    const res = await this.fetchFn(
      `${this.baseUrl}/sessions/${this.sessionId}/trace`,
    );
    if (!res.ok) {
      throw new SessionError(res.status, await detail(res));
    }
    return res.text();
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }

  private connect(): void {
    if (this.closed || this.wsCtor === null) return;
    const wsUrl = this.baseUrl.replace(/^http/, "ws");
    const ws = new this.wsCtor(`${wsUrl}/sessions/${this.sessionId}/events`);
    this.ws = ws;
    ws.onmessage = (ev) => {
      this.backoffMs = 250;
      this.store.apply(JSON.parse(String(ev.data)) as Delta);
    };
    const retry = () => {
      if (this.closed) return;
      const delay = this.backoffMs;
      this.backoffMs = Math.min(this.backoffMs * 2, 5000);
      setTimeout(() => {
        void this.resync().finally(() => this.connect());
      }, delay);
    };
    ws.onclose = retry;
    ws.onerror = () => ws.close();
  }
}

async function detail(res: { json(): Promise<unknown> }): Promise<string> {
  try {
    const body = (await res.json()) as { detail?: string };
    return body.detail ?? "request failed";
  } catch {
    return "request failed";
  }
}
