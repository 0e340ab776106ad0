/**
 * Transport layer: joins a session and keeps the model in sync.
 *
 * Speaks the WebSocket protocol with the REST endpoints as the join and
 * recovery path. The submit guard refuses anything the composer does not
 * offer, and a dropped connection reconnects with the stored credential.
 */

import { ActionChoice, ClientMessage, parseServerEvent } from "./protocol.js";
import {
  SessionState,
  composerOffers,
  initialState,
  reduce,
  stageAction,
} from "./session.js";

export interface WebSocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  send(data: string): void;
  close(): void;
}

export type WebSocketFactory = (url: string) => WebSocketLike;

export interface SessionClientOptions {
  serverUrl: string; // e.g. http://127.0.0.1:8000
  session: string;
  credential: string;
  wsFactory?: WebSocketFactory;
  reconnectDelayMs?: number;
}

export class SessionClient {
  state: SessionState = initialState();
  private socket: WebSocketLike | null = null;
  private listeners: Array<(state: SessionState) => void> = [];
  private stopped = false;

  constructor(private options: SessionClientOptions) {}

  onChange(listener: (state: SessionState) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  private wsUrl(): string {
    const base = this.options.serverUrl.replace(/^http/, "ws");
    return `${base}/sessions/${this.options.session}/ws?credential=${encodeURIComponent(
      this.options.credential,
    )}`;
  }

  connect(): void {
    const factory =
      this.options.wsFactory ?? ((url: string) => new WebSocket(url) as unknown as WebSocketLike);
    // reconnecting rebuilds the state from the full replayed event stream
    this.state = initialState();
    const socket = factory(this.wsUrl());
    this.socket = socket;
    socket.onmessage = (message) => {
      this.state = reduce(this.state, parseServerEvent(String(message.data)));
      this.emit();
    };
    socket.onclose = () => {
      this.socket = null;
      if (!this.stopped) {
        const delay = this.options.reconnectDelayMs ?? 1000;
        setTimeout(() => {
          if (!this.stopped) {
            this.connect();
          }
        }, delay);
      }
    };
    socket.onerror = () => undefined;
  }

  close(): void {
    this.stopped = true;
    this.socket?.close();
  }

  /** Stage a composer action; refuses anything the server did not offer. */
  submit(action: ActionChoice): void {
    if (!this.socket) {
      throw new Error("not connected");
    }
    if (!composerOffers(this.state, action)) {
      throw new Error("refusing to send an action the composer does not offer");
    }
    this.state = stageAction(this.state, action);
    const message: ClientMessage =
      "abstain" in action ? { client: "abstain" } : { client: "action", action };
    this.socket.send(JSON.stringify(message));
    this.emit();
  }
}

// ---------------------------------------------------------------------------
// REST fallback helpers (also used by the scripted end-to-end player)

export async function createSession(serverUrl: string, config: Record<string, unknown>) {
  const response = await fetch(`${serverUrl}/sessions`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ config }),
  });
  if (!response.ok) {
    throw new Error(`create failed: ${response.status} ${await response.text()}`);
  }
  return (await response.json()) as { session: string; status: string };
}

export async function joinSession(serverUrl: string, session: string, credential?: string) {
  const response = await fetch(`${serverUrl}/sessions/${session}/join`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(credential ? { credential } : {}),
  });
  if (!response.ok) {
    throw new Error(`join failed: ${response.status} ${await response.text()}`);
  }
  return (await response.json()) as { credential: string; name: string; session: string };
}

export async function fetchView(serverUrl: string, session: string, credential: string) {
  const response = await fetch(
    `${serverUrl}/sessions/${session}/view?credential=${encodeURIComponent(credential)}`,
  );
  if (!response.ok) {
    throw new Error(`view failed: ${response.status}`);
  }
  return (await response.json()) as {
    status: string;
    round?: number;
    legal_actions?: ActionChoice[];
  };
}

export async function fetchLog(serverUrl: string, session: string): Promise<string> {
  const response = await fetch(`${serverUrl}/sessions/${session}/log`);
  if (!response.ok) {
    throw new Error(`log not available: ${response.status}`);
  }
  return await response.text();
}
