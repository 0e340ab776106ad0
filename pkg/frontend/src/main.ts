/**
 * Browser entry point: join form, then the one-screen messaging interface.
 *
 * The page is re-rendered from ScreenState on every model change; buttons
 * exist only for the actions the server listed.
 */

import { SessionClient, joinSession } from "./client.js";
import { renderScreen } from "./render.js";

function element<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function mount(root: HTMLElement): void {
  const form = element("form", "join-form");
  const server = element("input", "server");
  server.value = `${location.protocol}//${location.host}`;
  const session = element("input", "session");
  session.placeholder = "session id";
  const token = element("input", "token");
  token.placeholder = "credential (blank to claim a seat)";
  const button = element("button", "join", "Join");
  form.append(server, session, token, button);
  root.append(form);

  form.onsubmit = async (ev) => {
    ev.preventDefault();
    const grant = await joinSession(
      server.value,
      session.value,
      token.value || undefined,
    );
    token.value = grant.credential;
    localStorage.setItem(`expertgame:${session.value}`, grant.credential);
    const client = new SessionClient({
      serverUrl: server.value,
      session: session.value,
      credential: grant.credential,
    });
    const screen = element("div", "screen");
    root.replaceChildren(screen);
    let deadlineAt: number | null = null;
    const redraw = () => {
      const countdown = deadlineAt === null ? null : (deadlineAt - Date.now()) / 1000;
      draw(screen, client, countdown);
    };
    client.onChange((state) => {
      deadlineAt = state.deadlineS === null ? null : Date.now() + state.deadlineS * 1000;
      redraw();
    });
    setInterval(redraw, 1000);
    client.connect();
  };
}

function draw(root: HTMLElement, client: SessionClient, countdownS: number | null): void {
  const screen = renderScreen(client.state, countdownS);
  root.replaceChildren();
  root.append(element("h1", "headline", screen.headline));
  if (screen.identity) {
    root.append(element("p", "identity", `You are ${screen.identity}`));
  }
  if (screen.assignment) {
    root.append(element("p", "assignment", screen.assignment));
  }
  if (screen.countdown) {
    root.append(element("p", "countdown", `Round ends in ${screen.countdown}`));
  }
  if (screen.scoreBadge) {
    root.append(element("p", "score-badge", screen.scoreBadge));
  }
  if (screen.toast) {
    root.append(element("p", "toast", screen.toast));
  }
  if (screen.stagedLabel) {
    root.append(element("p", "staged", `Staged: ${screen.stagedLabel}`));
  }
  const composer = element("div", "composer");
  for (const item of screen.composer) {
    const button = element(
      "button",
      `action${item.highlight ? " highlight" : ""}${item.staged ? " staged" : ""}`,
      item.label,
    );
    button.onclick = () => client.submit(item.action);
    composer.append(button);
  }
  root.append(composer);
  const inbox = element("div", "inbox");
  for (const group of screen.inboxByRound) {
    inbox.append(element("h3", "round", `Round ${group.round}`));
    for (const entry of group.entries) {
      inbox.append(element("p", "entry", entry));
    }
  }
  root.append(inbox);
}

const root = document.getElementById("app");
if (root) {
  mount(root);
}
