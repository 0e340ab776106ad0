#!/usr/bin/env python3
"""Play a live game as a scripted human against three agents.

Uses the service's REST fallback in-process (no network needed): create a
session, claim the human seat, then always request first and otherwise
reply until the series ends. The recorded log feeds the analysis module.
"""

from fastapi.testclient import TestClient

from expertgame.analysis import message_type_fractions, reply_stats
from expertgame.logs import parse_jsonl
from expertgame.service import SessionManager, create_app

client = TestClient(create_app(SessionManager()))

session = client.post("/sessions", json={"config": {
    "n_players": 4, "n_games": 2, "round_mean": 8, "round_jitter": 1,
    "master_seed": 11, "humans": 1, "round_deadline_s": 600,
}}).json()["session"]
grant = client.post(f"/sessions/{session}/join", json={}).json()
print(f"joined session {session} as {grant['name']!r}")

credential = grant["credential"]
last_round = None
while True:
    view = client.get(f"/sessions/{session}/view", params={"credential": credential}).json()
    if view["status"] == "done":
        break
    if (view["game_index"], view["round"]) != last_round:
        last_round = (view["game_index"], view["round"])
        print(f"game {view['game_index']} round {view['round']:>2}: "
              f"expertise {view['expertise']}, task {view['task']}, "
              f"{len(view['inbox'])} messages received, "
              f"{'scored' if view['scored'] else 'searching'}")
    # prefer a reply, then a request, else abstain
    actions = view["legal_actions"]
    choice = next((a for a in actions if a.get("type") in ("C", "R", "N")),
                  next((a for a in actions if a.get("type") == "Q"), {"abstain": True}))
    client.post(f"/sessions/{session}/action", json={"credential": credential, "action": choice})

log_text = client.get(f"/sessions/{session}/log").text
games = parse_jsonl(log_text)
print(f"\nseries over: {len(games)} games recorded")
stats = reply_stats(games)
q, y, n = message_type_fractions(games)
print(f"message mix {q:.0%}/{y:.0%}/{n:.0%}, "
      f"positive reply rate {stats.rate_positive:.2f}, negative {stats.rate_negative:.2f}")
