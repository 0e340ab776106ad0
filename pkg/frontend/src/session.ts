/**
 * Client-side session model: a pure reducer over the server event stream.
 *
 * The composer always mirrors the latest legal_actions event exactly, so
 * the UI cannot offer (or send) anything the server did not list. Staging
 * is optimistic and replaced on resubmission, matching the server's
 * semantics; replaying the same event stream reproduces the same states.
 */

import {
  ActionChoice,
  InboxEntry,
  ServerEvent,
  actionKey,
} from "./protocol.js";

export type SessionStatus = "lobby" | "in_round" | "between_games" | "done";

export interface SessionState {
  you: string | null;
  players: string[];
  status: SessionStatus;
  gameIndex: number;
  nGames: number;
  expertise: number | null;
  task: number | null;
  approxRounds: number | null;
  round: number | null;
  deadlineS: number | null;
  composer: ActionChoice[];
  inbox: InboxEntry[];
  scoredThisGame: boolean;
  totalScore: number;
  staged: ActionChoice | null;
  toast: string | null;
  eventLog: ServerEvent[];
}

export function initialState(): SessionState {
  return {
    you: null,
    players: [],
    status: "lobby",
    gameIndex: 0,
    nGames: 0,
    expertise: null,
    task: null,
    approxRounds: null,
    round: null,
    deadlineS: null,
    composer: [],
    inbox: [],
    scoredThisGame: false,
    totalScore: 0,
    staged: null,
    toast: null,
    eventLog: [],
  };
}

export function reduce(state: SessionState, event: ServerEvent): SessionState {
  const next: SessionState = { ...state, eventLog: [...state.eventLog, event] };
  switch (event.event) {
    case "lobby_state":
      if (state.status === "lobby") {
        next.players = new Array(event.players).fill("");
      }
      return next;
    case "game_start":
      next.status = "in_round";
      next.you = event.you;
      next.players = event.players;
      next.gameIndex = event.game_index;
      next.nGames = event.n_games;
      next.expertise = event.your_expertise;
      next.task = event.your_task;
      next.approxRounds = event.approx_rounds;
      next.inbox = [];
      next.composer = [];
      next.round = null;
      next.scoredThisGame = false;
      next.staged = null;
      return next;
    case "round_start":
      next.status = "in_round";
      next.round = event.round;
      next.deadlineS = event.deadline_s;
      next.composer = []; // stale lists must never offer last round's actions
      next.staged = null;
      next.toast = null;
      return next;
    case "legal_actions":
      next.composer = event.actions.slice();
      return next;
    case "delivery":
      next.inbox = [...state.inbox, ...event.inbox];
      return next;
    case "score":
      next.scoredThisGame = true;
      next.totalScore = state.totalScore + 1;
      return next;
    case "game_end":
      next.status = "between_games";
      next.composer = [];
      next.round = null;
      return next;
    case "series_end":
      next.status = "done";
      next.composer = [];
      next.staged = null;
      return next;
    case "error":
      next.toast = event.reason;
      next.staged = null; // resynchronize: the optimistic stage was refused
      return next;
    default:
      return next;
  }
}

export function replay(events: ServerEvent[]): SessionState {
  return events.reduce(reduce, initialState());
}

/** Optimistically stage a composer action; resubmission replaces. */
export function stageAction(state: SessionState, action: ActionChoice): SessionState {
  if (!composerOffers(state, action)) {
    throw new Error(`action not offered by the composer: ${actionKey(action)}`);
  }
  return { ...state, staged: action };
}

export function composerOffers(state: SessionState, action: ActionChoice): boolean {
  const key = actionKey(action);
  return state.composer.some((offered) => actionKey(offered) === key);
}

/** The expert's name once any delivered message revealed it. */
export function knownExpert(state: SessionState): string | null {
  for (const entry of state.inbox) {
    if (entry.type === "R" && entry.expert !== undefined) {
      return entry.expert;
    }
    if (entry.type === "C") {
      return entry.from;
    }
    if (entry.type === "Q" && entry.expertise !== undefined && entry.expertise === state.task) {
      return entry.from;
    }
  }
  return null;
}
