"""Round-synchronous session host for live games with humans and agents.

A session seats a fixed roster of human and agent players behind virtual
identity names, runs consecutive games with per-game re-randomized
assignments, and enforces the rules server-side: clients can only stage
messages the engine itself deems legal, and a round resolves as soon as
every human has submitted or its deadline elapses (silence = abstain).

All state mutations for a session are serialized by the HTTP layer through
one lock per session; `SessionCore` itself is synchronous and
single-threaded. Finished series are persisted in the standard JSON-lines
schema, so recorded human games feed the same analysis pipeline as
simulated ones.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import secrets
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, PlainTextResponse

from .agents import BayesianAgent
from .game import (
    ConfigurationError,
    ExpertGameError,
    GameState,
    Message,
    MessageType,
    RuleViolation,
    new_game,
    sample_assignment,
)
from .logs import GameLog, serialize_games
from .sim import SeriesConfig, _AGENT_STREAM, _GAME_STREAM, _stream

NAME_POOL = (
    "Avocet", "Bittern", "Curlew", "Dunlin", "Egret", "Fulmar", "Gannet",
    "Heron", "Ibis", "Jacana", "Kestrel", "Lapwing", "Merlin", "Nightjar",
    "Osprey", "Petrel", "Quail", "Redshank", "Sanderling", "Turnstone",
    "Upupa", "Vireo", "Wigeon", "Yellowhammer",
)


class ServiceError(ExpertGameError):
    """Session-level request error with an HTTP-ish status code."""

    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


@dataclass(frozen=True, slots=True)
class SessionConfig:
    series: SeriesConfig
    humans: int = 1
    round_deadline_s: float = 60.0

    def __post_init__(self) -> None:
        if not 0 <= self.humans <= self.series.n_players:
            raise ConfigurationError("human seats must be between 0 and the player count")
        if self.round_deadline_s <= 0:
            raise ConfigurationError("round deadline must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "SessionConfig":
        data = dict(data)
        humans = data.pop("humans", 1)
        deadline = data.pop("round_deadline_s", 60.0)
        data.pop("n_replicas", None)
        data.setdefault("master_seed", secrets.randbits(32))
        try:
            series = SeriesConfig.from_dict(data)
        except TypeError as exc:
            raise ConfigurationError(f"bad session config: {exc}") from None
        return cls(series=series, humans=humans, round_deadline_s=deadline)


@dataclass(slots=True)
class Seat:
    index: int
    name: str
    is_human: bool
    credential: str
    bound: bool
    events: list[dict] = field(default_factory=list)


class SessionCore:
    """One session's synchronous state machine; confine to one lock."""

    def __init__(self, session_id: str, config: SessionConfig, clock=time.monotonic):
        self.id = session_id
        self.config = config
        self.clock = clock
        self.status = "lobby"
        n = config.series.n_players
        seed = config.series.master_seed
        names_rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(99,)))
        names = list(NAME_POOL)
        names_rng.shuffle(names)
        while len(names) < n:
            names = names + [f"{base}-{i}" for i, base in enumerate(NAME_POOL)]
        self.seats = [
            Seat(
                index=i,
                name=names[i],
                is_human=i < config.humans,
                credential=secrets.token_hex(16),
                bound=i >= config.humans,  # agent seats are ready immediately
            )
            for i in range(n)
        ]
        self.by_credential = {seat.credential: seat for seat in self.seats}
        self.by_name = {seat.name: seat for seat in self.seats}
        self.agents = {
            seat.index: BayesianAgent(seat.index, n, config.series.agent.personality(),
                                      config.series.agent.grid())
            for seat in self.seats
            if not seat.is_human
        }
        self.game_index = 0
        self.state: GameState | None = None
        self._agent_rngs: dict[int, np.random.Generator] = {}
        self.deadline: float | None = None
        self.finished_games: list[GameLog] = []
        self._scores: list[tuple[int, int]] = []
        self._submitted_humans: set[int] = set()
        self.log_text: str | None = None
        self._broadcast({"event": "lobby_state", **self._lobby_payload()})
        if config.humans == 0:
            self._start_series()

    # ------------------------------------------------------------------
    # events

    def _emit(self, seat: Seat, event: dict) -> None:
        seat.events.append(event)

    def _broadcast(self, event: dict) -> None:
        for seat in self.seats:
            self._emit(seat, dict(event))

    def _lobby_payload(self) -> dict:
        return {
            "session": self.id,
            "status": self.status,
            "players": self.config.series.n_players,
            "bound": sum(1 for s in self.seats if s.bound),
        }

    # ------------------------------------------------------------------
    # lobby

    def join(self, credential: str | None = None) -> dict:
        if credential is not None:
            seat = self.by_credential.get(credential)
            if seat is None or not seat.bound:
                raise ServiceError(401, "unknown credential")
            return {"credential": seat.credential, "name": seat.name, "session": self.id}
        if self.status != "lobby":
            raise ServiceError(409, "session already started; reconnect with your credential")
        for seat in self.seats:
            if seat.is_human and not seat.bound:
                seat.bound = True
                self._broadcast({"event": "lobby_state", **self._lobby_payload()})
                if all(s.bound for s in self.seats):
                    self._start_series()
                return {"credential": seat.credential, "name": seat.name, "session": self.id}
        raise ServiceError(409, "session is full")

    # ------------------------------------------------------------------
    # game flow

    def _start_series(self) -> None:
        self.status = "in_round"
        self._start_game()

    def _start_game(self) -> None:
        series = self.config.series
        g = self.game_index
        game_rng = _stream(series.master_seed, (0, g, _GAME_STREAM))
        assignment = sample_assignment(series.n_players, game_rng)
        lo, hi = series.round_mean - series.round_jitter, series.round_mean + series.round_jitter
        round_limit = int(game_rng.integers(lo, hi + 1))
        self.state = new_game(assignment, round_limit)
        self._scores = []
        self._agent_rngs = {
            i: _stream(series.master_seed, (0, g, _AGENT_STREAM, i)) for i in self.agents
        }
        for agent in self.agents.values():
            agent.begin_game()
        for seat in self.seats:
            self._emit(seat, {
                "event": "game_start",
                "game_index": g + 1,
                "n_games": series.n_games,
                "your_expertise": assignment.expertise_of[seat.index],
                "your_task": assignment.task_of[seat.index],
                "approx_rounds": series.round_mean,
                "players": [s.name for s in self.seats],
                "you": seat.name,
            })
        self._start_round()

    def _start_round(self) -> None:
        self.status = "in_round"
        self._submitted_humans.clear()
        self.deadline = self.clock() + self.config.round_deadline_s
        for seat in self.seats:
            self._emit(seat, {
                "event": "round_start",
                "round": self.state.round,
                "deadline_s": self.config.round_deadline_s,
            })
            self._emit(seat, {
                "event": "legal_actions",
                "round": self.state.round,
                "actions": self._legal_action_payload(seat.index),
            })
        for index, agent in self.agents.items():
            action = agent.act(self.state.player_view(index), self._agent_rngs[index])
            self.state.stage_action(index, action)
        self._advance_if_ready()

    def _human_seats(self):
        return [s for s in self.seats if s.is_human]

    def _advance_if_ready(self) -> None:
        humans = self._human_seats()
        if all(s.index in self._submitted_humans for s in humans):
            self._resolve_round()

    def maybe_timeout(self) -> bool:
        """Resolve the round when its deadline has passed (silence = abstain)."""
        if self.status == "in_round" and self.deadline is not None and self.clock() > self.deadline:
            self._resolve_round()
            return True
        return False

    def _resolve_round(self) -> None:
        state = self.state
        rnd = state.round
        outcome = state.resolve_round()
        self._scores.extend((p, rnd) for p in outcome.newly_scored)
        for seat in self.seats:
            delivered = [m for m in outcome.delivered if m.receiver == seat.index]
            self._emit(seat, {
                "event": "delivery",
                "round": rnd,
                "inbox": [self._inbox_entry(m) for m in delivered],
            })
        for player in outcome.newly_scored:
            self._emit(self.seats[player], {"event": "score", "round": rnd})
        if outcome.finished:
            self._finish_game()
        else:
            self._start_round()

    def _finish_game(self) -> None:
        state = self.state
        log = GameLog(state.assignment, state.round_limit, state.history, self._scores)
        self.finished_games.append(log)
        for seat in self.seats:
            self._emit(seat, {
                "event": "game_end",
                "game_index": self.game_index + 1,
                "rounds": log.rounds,
                "your_score": 1 if state.scored[seat.index] else 0,
            })
        for agent in self.agents.values():
            agent.finish_game(log)
        self.game_index += 1
        if self.game_index < self.config.series.n_games:
            self.status = "between_games"
            self._start_game()
        else:
            self.status = "done"
            self.state = None
            self.deadline = None
            self.log_text = serialize_games(self.finished_games)
            self._broadcast({"event": "series_end", "n_games": len(self.finished_games)})

    # ------------------------------------------------------------------
    # client requests

    def _auth(self, credential: str) -> Seat:
        seat = self.by_credential.get(credential)
        if seat is None or not seat.bound:
            raise ServiceError(401, "unknown credential")
        return seat

    def _parse_action(self, seat: Seat, payload: dict) -> Message | None:
        if payload.get("abstain"):
            return None
        try:
            mtype = MessageType(payload["type"])
        except (KeyError, ValueError):
            raise ServiceError(422, "action needs a type of Q, C, R or N, or abstain") from None
        target = self.by_name.get(payload.get("to"))
        if target is None:
            raise ServiceError(422, f"unknown player name {payload.get('to')!r}")
        expert = None
        if mtype is MessageType.R:
            expert = self.state.assignment.expert_of[target.index]
        return Message(mtype, seat.index, target.index, self.state.round, expert)

    def submit(self, credential: str, payload: dict) -> dict:
        seat = self._auth(credential)
        if self.maybe_timeout():
            raise ServiceError(409, "too late: the round deadline passed and a new round started")
        if self.status == "done":
            raise ServiceError(409, "the series is over")
        if self.status != "in_round":
            raise ServiceError(409, "no round is accepting actions")
        if not seat.is_human:
            raise ServiceError(403, "agent seats are driven by the server")
        action = self._parse_action(seat, payload)
        try:
            self.state.stage_action(seat.index, action)
        except RuleViolation as exc:
            raise ServiceError(422, str(exc)) from None
        self._submitted_humans.add(seat.index)
        staged = self._action_payload(action)
        self._advance_if_ready()
        return {"staged": staged}

    def state_view(self, credential: str) -> dict:
        seat = self._auth(credential)
        self.maybe_timeout()
        view: dict = {
            "session": self.id,
            "you": seat.name,
            "status": self.status,
            "game_index": min(self.game_index + 1, self.config.series.n_games),
            "n_games": self.config.series.n_games,
            "players": [s.name for s in self.seats],
        }
        if self.status == "done" or self.state is None:
            return view
        state = self.state
        idx = seat.index
        remaining = None
        if self.deadline is not None:
            remaining = max(0.0, self.deadline - self.clock())
        view.update({
            "round": state.round,
            "approx_rounds": self.config.series.round_mean,
            "deadline_s": remaining,
            "expertise": state.assignment.expertise_of[idx],
            "task": state.assignment.task_of[idx],
            "scored": state.scored[idx],
            "expert": self.seats[state.known_expert[idx]].name if state.known_expert[idx] is not None else None,
            "inbox": [self._inbox_entry(m) for m in state.inboxes[idx]],
            "legal_actions": self._legal_action_payload(idx),
            "submitted": idx in self._submitted_humans,
        })
        return view

    def events_since(self, credential: str, cursor: int) -> tuple[int, list[dict]]:
        seat = self._auth(credential)
        self.maybe_timeout()
        events = seat.events[cursor:]
        return len(seat.events), events

    def _inbox_entry(self, m: Message) -> dict:
        entry = {"type": m.type.value, "from": self.seats[m.sender].name, "round": m.round_sent}
        if m.type is MessageType.Q:
            entry["expertise"] = self.state.assignment.expertise_of[m.sender]
            entry["task"] = self.state.assignment.task_of[m.sender]
        elif m.type is MessageType.R:
            entry["expert"] = self.seats[m.payload].name
        return entry

    def _action_payload(self, action: Message | None) -> dict:
        if action is None:
            return {"abstain": True}
        payload = {"type": action.type.value, "to": self.seats[action.receiver].name}
        if action.type is MessageType.R:
            payload["expert"] = self.seats[action.payload].name
        return payload

    def _legal_action_payload(self, index: int) -> list[dict]:
        if self.state is None or self.state.finished:
            return []
        actions = [self._action_payload(m) for m in self.state.legal_messages(index)]
        actions.append({"abstain": True})
        return actions


class SessionManager:
    """All live sessions plus idempotent creation and log persistence."""

    def __init__(self, log_dir: str | Path | None = None):
        self.sessions: dict[str, SessionCore] = {}
        self.by_idempotency_key: dict[str, str] = {}
        self.log_dir = Path(log_dir) if log_dir else None

    def create(self, config: SessionConfig, idempotency_key: str | None = None) -> SessionCore:
        if idempotency_key and idempotency_key in self.by_idempotency_key:
            return self.sessions[self.by_idempotency_key[idempotency_key]]
        session = SessionCore(uuid.uuid4().hex[:12], config)
        self.sessions[session.id] = session
        if idempotency_key:
            self.by_idempotency_key[idempotency_key] = session.id
        return session

    def get(self, session_id: str) -> SessionCore:
        session = self.sessions.get(session_id)
        if session is None:
            raise ServiceError(404, f"no session {session_id!r}")
        return session

    def persist(self, session: SessionCore) -> Path | None:
        if session.log_text is None or self.log_dir is None:
            return None
        self.log_dir.mkdir(parents=True, exist_ok=True)
        path = self.log_dir / f"session_{session.id}.jsonl"
        if not path.exists():
            path.write_text(session.log_text, encoding="utf-8")
        return path


def create_app(manager: SessionManager | None = None) -> FastAPI:
    """FastAPI app exposing the wire protocol plus a REST fallback."""
    app = FastAPI(title="expertgame service")
    app.state.manager = manager or SessionManager()
    locks: dict[str, asyncio.Lock] = {}
    conditions: dict[str, asyncio.Condition] = {}

    def lock_for(session_id: str) -> asyncio.Lock:
        return locks.setdefault(session_id, asyncio.Lock())

    def condition_for(session_id: str) -> asyncio.Condition:
        return conditions.setdefault(session_id, asyncio.Condition())

    mgr: SessionManager = app.state.manager

    @app.exception_handler(ServiceError)
    async def service_error_handler(_, exc: ServiceError):
        return JSONResponse(status_code=exc.status, content={"error": str(exc)})

    @app.exception_handler(ConfigurationError)
    async def config_error_handler(_, exc: ConfigurationError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    async def notify(session_id: str) -> None:
        condition = condition_for(session_id)
        async with condition:
            condition.notify_all()

    async def with_session(session_id: str, fn):
        session = mgr.get(session_id)
        async with lock_for(session_id):
            result = fn(session)
            mgr.persist(session)
        await notify(session_id)
        return result

    @app.post("/sessions")
    async def create_session(body: dict):
        config = SessionConfig.from_dict(dict(body.get("config", body)))
        session = mgr.create(config, body.get("idempotency_key"))
        async with lock_for(session.id):
            mgr.persist(session)
        return {"session": session.id, "status": session.status,
                "players": config.series.n_players, "humans": config.humans}

    @app.post("/sessions/{session_id}/join")
    async def join(session_id: str, body: dict | None = None):
        body = body or {}
        return await with_session(session_id, lambda s: s.join(body.get("credential")))

    @app.get("/sessions/{session_id}/view")
    async def view(session_id: str, credential: str):
        return await with_session(session_id, lambda s: s.state_view(credential))

    @app.post("/sessions/{session_id}/action")
    async def action(session_id: str, body: dict):
        credential = body.get("credential", "")
        payload = body.get("action", body)
        return await with_session(session_id, lambda s: s.submit(credential, payload))

    @app.get("/sessions/{session_id}/events")
    async def events(session_id: str, credential: str, cursor: int = 0):
        next_cursor, items = await with_session(
            session_id, lambda s: s.events_since(credential, cursor)
        )
        return {"cursor": next_cursor, "events": items}

    @app.get("/sessions/{session_id}/log")
    async def log(session_id: str):
        session = mgr.get(session_id)
        if session.log_text is None:
            raise ServiceError(409, "the series is not finished")
        return PlainTextResponse(session.log_text, media_type="application/jsonl")

    @app.websocket("/sessions/{session_id}/ws")
    async def websocket_endpoint(websocket: WebSocket, session_id: str, credential: str):
        try:
            session = mgr.get(session_id)
            async with lock_for(session_id):
                session._auth(credential)
        except ServiceError:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        closed = asyncio.Event()

        async def reader():
            # client messages mutate the session; errors go back as events
            try:
                while True:
                    message = json.loads(await websocket.receive_text())
                    kind = message.get("client")
                    try:
                        async with lock_for(session_id):
                            if kind == "action":
                                session.submit(credential, message.get("action", {}))
                            elif kind == "abstain":
                                session.submit(credential, {"abstain": True})
                            elif kind != "join":
                                raise ServiceError(422, f"unknown client message {kind!r}")
                            mgr.persist(session)
                        await notify(session_id)
                    except ServiceError as exc:
                        await websocket.send_text(json.dumps(
                            {"event": "error", "status": exc.status, "reason": str(exc)}
                        ))
            except (WebSocketDisconnect, RuntimeError, json.JSONDecodeError):
                closed.set()

        reader_task = asyncio.create_task(reader())
        cursor = 0
        condition = condition_for(session_id)
        try:
            while not closed.is_set():
                async with lock_for(session_id):
                    session.maybe_timeout()
                    cursor, items = session.events_since(credential, cursor)
                    mgr.persist(session)
                for event in items:
                    await websocket.send_text(json.dumps(event))
                if items:
                    continue
                async with condition:
                    try:
                        await asyncio.wait_for(condition.wait(), timeout=0.2)
                    except asyncio.TimeoutError:
                        pass
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            reader_task.cancel()

    return app


def main(argv=None) -> None:
    import uvicorn

    parser = argparse.ArgumentParser(description="Serve live expert games")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--log-dir", default="service_logs")
    args = parser.parse_args(argv)
    app = create_app(SessionManager(log_dir=args.log_dir))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
