/**
 * Screen-state derivation: everything the page shows, as plain data.
 *
 * Pure function of the session state (plus the current countdown), so
 * tests can assert whole screens without a DOM.
 */

import { ActionChoice, isAbstain } from "./protocol.js";
import { SessionState, knownExpert } from "./session.js";

export interface ComposerButton {
  label: string;
  action: ActionChoice;
  highlight: boolean;
  staged: boolean;
}

export interface InboxRound {
  round: number;
  entries: string[];
}

export interface ScreenState {
  headline: string;
  identity: string | null;
  assignment: string | null;
  countdown: string | null;
  scoreBadge: string | null;
  inboxByRound: InboxRound[];
  composer: ComposerButton[];
  stagedLabel: string | null;
  toast: string | null;
  status: string;
}

function actionLabel(action: ActionChoice): string {
  if (isAbstain(action)) {
    return "Send nothing";
  }
  switch (action.type) {
    case "Q":
      return `Ask ${action.to}`;
    case "C":
      return `Confirm ${action.to}`;
    case "R":
      return action.expert ? `Refer ${action.to} to ${action.expert}` : `Refer ${action.to}`;
    case "N":
      return `Tell ${action.to} you don't know`;
  }
}

function entryLabel(entry: SessionState["inbox"][number]): string {
  switch (entry.type) {
    case "Q":
      return `${entry.from} asks for expertise ${entry.task}; they have expertise ${entry.expertise} and task ${entry.task}`;
    case "C":
      return `${entry.from} confirmed your task - point earned`;
    case "R":
      return `${entry.from} says your expert is ${entry.expert}`;
    case "N":
      return `${entry.from} doesn't know your expert`;
  }
}

export function renderScreen(state: SessionState, countdownS?: number | null): ScreenState {
  const expert = knownExpert(state);
  const stagedKey = state.staged === null ? null : JSON.stringify(state.staged);
  const rounds = new Map<number, string[]>();
  for (const entry of state.inbox) {
    const bucket = rounds.get(entry.round) ?? [];
    bucket.push(entryLabel(entry));
    rounds.set(entry.round, bucket);
  }
  const inboxByRound = [...rounds.entries()]
    .sort((a, b) => b[0] - a[0])
    .map(([round, entries]) => ({ round, entries }));

  let headline: string;
  if (state.status === "lobby") {
    headline = "Waiting for players";
  } else if (state.status === "done") {
    headline = `Series over - ${state.totalScore} point${state.totalScore === 1 ? "" : "s"}`;
  } else if (state.status === "between_games") {
    headline = `Game ${state.gameIndex} finished`;
  } else {
    headline = `Game ${state.gameIndex}/${state.nGames} - round ${state.round} of ~${state.approxRounds}`;
  }

  const countdown =
    countdownS === undefined || countdownS === null || state.status !== "in_round"
      ? null
      : `${Math.max(0, Math.ceil(countdownS))}s`;

  return {
    headline,
    identity: state.you,
    assignment:
      state.expertise === null ? null : `You hold expertise ${state.expertise}; you need expertise ${state.task}`,
    countdown,
    scoreBadge: state.scoredThisGame ? "point earned" : null,
    inboxByRound,
    composer: state.composer.map((action) => ({
      label: actionLabel(action),
      action,
      highlight: !isAbstain(action) && action.type === "Q" && expert !== null && action.to === expert,
      staged: stagedKey !== null && JSON.stringify(action) === stagedKey,
    })),
    stagedLabel: state.staged === null ? null : actionLabel(state.staged),
    toast: state.toast,
    status: state.status,
  };
}
