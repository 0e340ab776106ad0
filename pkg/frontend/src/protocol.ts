/**
 * Wire protocol spoken by the game service.
 *
 * Server to client: one JSON event per message. Client to server: join,
 * action or abstain. All player references are virtual identity names.
 */

export type MessageTypeLetter = "Q" | "C" | "R" | "N";

export type ActionChoice =
  | { type: MessageTypeLetter; to: string; expert?: string }
  | { abstain: true };

export interface InboxEntry {
  type: MessageTypeLetter;
  from: string;
  round: number;
  expertise?: number;
  task?: number;
  expert?: string;
}

export interface LobbyStateEvent {
  event: "lobby_state";
  session: string;
  status: string;
  players: number;
  bound: number;
}

export interface GameStartEvent {
  event: "game_start";
  game_index: number;
  n_games: number;
  your_expertise: number;
  your_task: number;
  approx_rounds: number;
  players: string[];
  you: string;
}

export interface RoundStartEvent {
  event: "round_start";
  round: number;
  deadline_s: number;
}

export interface LegalActionsEvent {
  event: "legal_actions";
  round: number;
  actions: ActionChoice[];
}

export interface DeliveryEvent {
  event: "delivery";
  round: number;
  inbox: InboxEntry[];
}

export interface ScoreEvent {
  event: "score";
  round: number;
}

export interface GameEndEvent {
  event: "game_end";
  game_index: number;
  rounds: number;
  your_score: number;
}

export interface SeriesEndEvent {
  event: "series_end";
  n_games: number;
}

export interface ErrorEvent {
  event: "error";
  status: number;
  reason: string;
}

export type ServerEvent =
  | LobbyStateEvent
  | GameStartEvent
  | RoundStartEvent
  | LegalActionsEvent
  | DeliveryEvent
  | ScoreEvent
  | GameEndEvent
  | SeriesEndEvent
  | ErrorEvent;

export type ClientMessage =
  | { client: "join" }
  | { client: "action"; action: ActionChoice }
  | { client: "abstain" };

/** Canonical key for comparing and deduplicating action choices. */
export function actionKey(action: ActionChoice): string {
  if ("abstain" in action) {
    return "abstain";
  }
  return `${action.type}>${action.to}`;
}

export function isAbstain(action: ActionChoice): action is { abstain: true } {
  return "abstain" in action;
}

export function parseServerEvent(text: string): ServerEvent {
  const data = JSON.parse(text);
  if (typeof data !== "object" || data === null || typeof data.event !== "string") {
    throw new Error(`not a server event: ${text}`);
  }
  return data as ServerEvent;
}
