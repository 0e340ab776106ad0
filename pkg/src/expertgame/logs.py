"""Append-only JSON-lines game logs.

One event per line; a series file is the concatenation of its games. The
schema is shared by the simulator, the live service and the analysis
toolkit:

    {"event": "assignment", "expertise": [...], "task": [...]}
    {"event": "message", "type": "Q", "from": 0, "to": 3, "round": 2}
    {"event": "message", "type": "R", "from": 1, "to": 4, "round": 5, "payload": 2}
    {"event": "score", "player": 3, "round": 4}
    {"event": "game_end", "rounds": 15}

`assignment` opens a game, `game_end` closes it. Field names are normative.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .game import Assignment, Message, MessageType


class LogFormatError(ValueError):
    """A log line or event stream does not follow the schema."""


@dataclass(slots=True)
class GameLog:
    """The complete record of one finished game."""

    assignment: Assignment
    rounds: int
    messages: list[Message] = field(default_factory=list)
    scores: list[tuple[int, int]] = field(default_factory=list)  # (player, round)

    @property
    def n_players(self) -> int:
        return self.assignment.n_players

    def messages_by_round(self) -> list[list[Message]]:
        """Messages grouped by round, index 0 = round 1; length == rounds."""
        grouped: list[list[Message]] = [[] for _ in range(self.rounds)]
        for m in self.messages:
            grouped[m.round_sent - 1].append(m)
        return grouped

    def events(self) -> Iterator[dict]:
        yield {
            "event": "assignment",
            "expertise": list(self.assignment.expertise_of),
            "task": list(self.assignment.task_of),
        }
        score_rounds: dict[int, list[int]] = {}
        for player, rnd in self.scores:
            score_rounds.setdefault(rnd, []).append(player)
        by_round = self.messages_by_round()
        for rnd in range(1, self.rounds + 1):
            for m in by_round[rnd - 1]:
                ev = {
                    "event": "message",
                    "type": m.type.value,
                    "from": m.sender,
                    "to": m.receiver,
                    "round": m.round_sent,
                }
                if m.payload is not None:
                    ev["payload"] = m.payload
                yield ev
            for player in score_rounds.get(rnd, ()):
                yield {"event": "score", "player": player, "round": rnd}
        yield {"event": "game_end", "rounds": self.rounds}


def dump_event(event: dict) -> str:
    return json.dumps(event, sort_keys=True, separators=(",", ":"))


def serialize_games(games: Iterable[GameLog]) -> str:
    """Render games as a JSON-lines document (one series per call)."""
    lines = []
    for game in games:
        lines.extend(dump_event(ev) for ev in game.events())
    return "\n".join(lines) + "\n" if lines else ""


def _message_from_event(ev: dict) -> Message:
    return Message(
        type=MessageType(ev["type"]),
        sender=int(ev["from"]),
        receiver=int(ev["to"]),
        round_sent=int(ev["round"]),
        payload=int(ev["payload"]) if "payload" in ev else None,
    )


def parse_events(events: Iterable[dict]) -> list[GameLog]:
    """Reassemble GameLogs from a stream of schema events."""
    games: list[GameLog] = []
    assignment: Assignment | None = None
    messages: list[Message] = []
    scores: list[tuple[int, int]] = []
    for ev in events:
        kind = ev.get("event")
        if kind == "assignment":
            if assignment is not None:
                raise LogFormatError("assignment event before previous game_end")
            assignment = Assignment(tuple(ev["expertise"]), tuple(ev["task"]))
        elif kind == "message":
            if assignment is None:
                raise LogFormatError("message event outside a game")
            messages.append(_message_from_event(ev))
        elif kind == "score":
            if assignment is None:
                raise LogFormatError("score event outside a game")
            scores.append((int(ev["player"]), int(ev["round"])))
        elif kind == "game_end":
            if assignment is None:
                raise LogFormatError("game_end without assignment")
            games.append(GameLog(assignment, int(ev["rounds"]), messages, scores))
            assignment, messages, scores = None, [], []
        else:
            raise LogFormatError(f"unknown event kind: {kind!r}")
    if assignment is not None:
        raise LogFormatError("truncated log: missing game_end")
    return games


def parse_jsonl(text: str) -> list[GameLog]:
    events = []
    for i, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            events.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise LogFormatError(f"line {i} is not valid JSON: {exc}") from exc
    return parse_events(events)


def replay_games(games: Iterable[GameLog]) -> list[GameLog]:
    """Re-run recorded games through a fresh rules engine.

    Every recorded message is staged and every round resolved exactly as in
    the original session, so the result must reproduce the input event for
    event; an illegal recorded message raises. Used to prove that recorded
    logs are rule-conformant and yield identical analysis metrics offline.
    """
    from .game import new_game

    replayed = []
    for game in games:
        state = new_game(game.assignment, game.rounds)
        by_round = game.messages_by_round()
        scores: list[tuple[int, int]] = []
        for rnd in range(1, game.rounds + 1):
            for m in by_round[rnd - 1]:
                state.stage_action(m.sender, m)
            outcome = state.resolve_round()
            scores.extend((p, rnd) for p in outcome.newly_scored)
        replayed.append(GameLog(game.assignment, game.rounds, state.history, scores))
    return replayed


def read_jsonl(path) -> list[GameLog]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_jsonl(fh.read())


def write_jsonl(path, games: Iterable[GameLog]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_games(games))
