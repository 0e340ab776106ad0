"""Rules engine for a single expert game.

Players hold a unique expertise and a unique task. Each player's goal is to
locate the one other player whose expertise matches their own task (their
"expert") and receive a confirmation from them. Play is round-synchronous:
every player stages at most one message per round and all staged messages
are delivered simultaneously when the round resolves.

Message types:
    Q  request: reveals the sender's expertise and task to the receiver.
    C  confirmation: only from the receiver's expert; scores one point.
    R  referral: reveals the identity of the receiver's expert.
    N  negation: the sender does not know the receiver's expert.

Replies (C/R/N) are only legal toward players who previously sent the
replier a request, and their type is fully determined by what the replier
currently knows: deception is impossible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

PlayerId = int

MIN_PLAYERS = 3  # the game is defined for more than two participants


class ExpertGameError(Exception):
    """Base class for all rule and configuration errors."""


class ConfigurationError(ExpertGameError):
    """Invalid game or series configuration."""


class NotAParticipantError(ExpertGameError):
    """Player id outside this game's roster."""


class RuleViolation(ExpertGameError):
    """Attempt to stage a message the rules forbid."""


class GameOverError(ExpertGameError):
    """Action attempted after the final round resolved."""


class MessageType(Enum):
    Q = "Q"
    C = "C"
    R = "R"
    N = "N"

    @property
    def is_reply(self) -> bool:
        return self is not MessageType.Q


@dataclass(frozen=True, slots=True)
class Message:
    """A directed message event; `payload` names the expert for R only."""

    type: MessageType
    sender: PlayerId
    receiver: PlayerId
    round_sent: int
    payload: PlayerId | None = None


@dataclass(frozen=True, slots=True)
class Assignment:
    """Expertise and task bijections over the players of one game.

    ``expertise_of[p]`` and ``task_of[p]`` are id numbers in ``[0, n)``;
    task ``i`` is completed by expertise ``i``. The derived ``expert_of[y]``
    is the player holding the expertise matching ``y``'s task, and never
    equals ``y``.
    """

    expertise_of: tuple[int, ...]
    task_of: tuple[int, ...]
    expert_of: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = len(self.expertise_of)
        if n < MIN_PLAYERS:
            raise ConfigurationError(f"need more than two players, got {n}")
        if sorted(self.expertise_of) != list(range(n)) or sorted(self.task_of) != list(range(n)):
            raise ConfigurationError("expertise and task maps must both be bijections over the players")
        if any(e == t for e, t in zip(self.expertise_of, self.task_of)):
            raise ConfigurationError("a player may never hold the expertise matching their own task")
        holder = {e: p for p, e in enumerate(self.expertise_of)}
        object.__setattr__(self, "expert_of", tuple(holder[t] for t in self.task_of))

    @property
    def n_players(self) -> int:
        return len(self.expertise_of)


def sample_assignment(n: int, rng: np.random.Generator) -> Assignment:
    """Draw an assignment uniformly over all valid (expertise, task) pairs.

    Valid pairs are exactly those where no player holds the expertise
    matching their own task (equivalently: the expert-of map has no fixed
    point). Rejection sampling from independent uniform permutations keeps
    the accepted distribution uniform.
    """
    if n <= 2:
        raise ConfigurationError(f"need more than two players, got {n}")
    while True:
        expertise = rng.permutation(n)
        task = rng.permutation(n)
        if not np.any(expertise == task):
            return Assignment(tuple(int(e) for e in expertise), tuple(int(t) for t in task))


@dataclass(frozen=True, slots=True)
class ReplyOption:
    """The single reply currently legal toward one pending requester."""

    type: MessageType
    receiver: PlayerId
    payload: PlayerId | None = None


@dataclass(frozen=True, slots=True)
class PlayerView:
    """Everything a single seat may legitimately see.

    Contains nothing about other players beyond what delivered messages
    revealed; ``replies`` lists the one legal reply per pending requester
    as of the current round.
    """

    player: PlayerId
    n_players: int
    round: int
    round_limit: int
    expertise: int
    task: int
    scored: bool
    expert: PlayerId | None
    inbox: tuple[Message, ...]
    replies: tuple[ReplyOption, ...]
    finished: bool


@dataclass(slots=True)
class RoundOutcome:
    delivered: list[Message]
    newly_scored: list[PlayerId]
    finished: bool


@dataclass(slots=True)
class GameState:
    """Mutable state of one game; confine an instance to one thread.

    ``history`` holds delivered messages only; a message delivered at the
    end of round t becomes usable knowledge from round t+1. Knowledge only
    accrues and always matches the assignment.
    """

    assignment: Assignment
    round_limit: int
    round: int = 1
    history: list[Message] = field(default_factory=list)
    staged: dict[PlayerId, Message | None] = field(default_factory=dict)
    scored: list[bool] = field(init=False)
    requesters: list[set[PlayerId]] = field(init=False)
    known_expertise: list[dict[PlayerId, int]] = field(init=False)
    known_task: list[dict[PlayerId, int]] = field(init=False)
    known_expert: list[PlayerId | None] = field(init=False)
    inboxes: list[list[Message]] = field(init=False)
    finished: bool = False

    def __post_init__(self) -> None:
        if self.round_limit < 1:
            raise ConfigurationError(f"round limit must be positive, got {self.round_limit}")
        n = self.assignment.n_players
        self.scored = [False] * n
        self.requesters = [set() for _ in range(n)]
        self.known_expertise = [{} for _ in range(n)]
        self.known_task = [{} for _ in range(n)]
        self.known_expert = [None] * n
        self.inboxes = [[] for _ in range(n)]

    @property
    def n_players(self) -> int:
        return self.assignment.n_players

    def _check_player(self, player: PlayerId) -> None:
        if not 0 <= player < self.n_players:
            raise NotAParticipantError(f"player {player} is not in this game")

    def reply_options(self, player: PlayerId) -> list[ReplyOption]:
        """Current legal reply toward each pending requester of `player`.

        Exactly one of C/R/N is legal per requester at any moment: C when
        the player is the requester's expert, R when the player learned the
        expert's expertise (from the expert's own request), N otherwise.
        """
        self._check_player(player)
        assignment = self.assignment
        expert_of = assignment.expert_of
        known = self.known_expertise[player]
        options = []
        for y in sorted(self.requesters[player]):
            expert = expert_of[y]
            if expert == player:
                options.append(ReplyOption(MessageType.C, y))
            elif expert in known:
                options.append(ReplyOption(MessageType.R, y, expert))
            else:
                options.append(ReplyOption(MessageType.N, y))
        return options

    def legal_messages(self, player: PlayerId) -> list[Message]:
        """Every message `player` may stage this round (abstain is always allowed too)."""
        if self.finished:
            raise GameOverError("game is finished")
        self._check_player(player)
        msgs = [
            Message(MessageType.Q, player, y, self.round)
            for y in range(self.n_players)
            if y != player
        ]
        msgs.extend(
            Message(opt.type, player, opt.receiver, self.round, opt.payload)
            for opt in self.reply_options(player)
        )
        return msgs

    def _validate(self, player: PlayerId, msg: Message) -> None:
        if msg.sender != player:
            raise RuleViolation("a player may only stage their own messages")
        receiver = msg.receiver
        if not 0 <= receiver < self.n_players or receiver == player:
            raise RuleViolation("receiver must be another participant")
        if msg.type is MessageType.Q:
            if msg.payload is not None:
                raise RuleViolation("requests carry no payload")
            return
        if receiver not in self.requesters[player]:
            raise RuleViolation("replies may only go to players who previously sent a request")
        expert = self.assignment.expert_of[receiver]
        if msg.type is MessageType.C:
            if expert != player:
                raise RuleViolation("confirmation requires the sender's expertise to match the receiver's task")
            if msg.payload is not None:
                raise RuleViolation("confirmations carry no payload")
        elif msg.type is MessageType.R:
            if expert == player:
                raise RuleViolation("the expert must confirm, not refer")
            if expert not in self.known_expertise[player]:
                raise RuleViolation("referral requires knowing whose expertise matches the receiver's task")
            if msg.payload != expert:
                raise RuleViolation("a referral must name the receiver's true expert")
        else:  # N
            if expert == player or expert in self.known_expertise[player]:
                raise RuleViolation("negation is only legal while the sender does not know the expert")
            if msg.payload is not None:
                raise RuleViolation("negations carry no payload")

    def stage_action(self, player: PlayerId, action: Message | None) -> None:
        """Stage `action` for this round; None abstains. Restaging replaces."""
        if self.finished:
            raise GameOverError("game is finished")
        self._check_player(player)
        if action is not None:
            self._validate(player, action)
            if action.round_sent != self.round:
                action = Message(action.type, action.sender, action.receiver, self.round, action.payload)
        self.staged[player] = action

    def resolve_round(self) -> RoundOutcome:
        """Deliver all staged messages simultaneously and advance the round.

        Unstaged players abstain. Each delivered Q teaches the receiver the
        sender's expertise and task; R (and a C, and a Q from the expert
        itself) reveal the receiver's expert; the first C delivered to a
        player scores their single point.
        """
        if self.finished:
            raise GameOverError("game is finished")
        assignment = self.assignment
        delivered: list[Message] = []
        newly_scored: list[PlayerId] = []
        for sender in range(self.n_players):
            msg = self.staged.get(sender)
            if msg is None:
                continue
            delivered.append(msg)
            self.history.append(msg)
            receiver = msg.receiver
            self.inboxes[receiver].append(msg)
            if msg.type is MessageType.Q:
                self.requesters[receiver].add(sender)
                self.known_expertise[receiver][sender] = assignment.expertise_of[sender]
                self.known_task[receiver][sender] = assignment.task_of[sender]
                if assignment.expertise_of[sender] == assignment.task_of[receiver]:
                    self.known_expert[receiver] = sender
            elif msg.type is MessageType.C:
                self.known_expert[receiver] = sender
                if not self.scored[receiver]:
                    self.scored[receiver] = True
                    newly_scored.append(receiver)
            elif msg.type is MessageType.R:
                self.known_expert[receiver] = msg.payload
        self.staged.clear()
        self.round += 1
        self.finished = self.round > self.round_limit
        return RoundOutcome(delivered, newly_scored, self.finished)

    def player_view(self, player: PlayerId) -> PlayerView:
        self._check_player(player)
        return PlayerView(
            player=player,
            n_players=self.n_players,
            round=self.round,
            round_limit=self.round_limit,
            expertise=self.assignment.expertise_of[player],
            task=self.assignment.task_of[player],
            scored=self.scored[player],
            expert=self.known_expert[player],
            inbox=tuple(self.inboxes[player]),
            replies=tuple(self.reply_options(player)) if not self.finished else (),
            finished=self.finished,
        )


def new_game(assignment: Assignment, round_limit: int) -> GameState:
    return GameState(assignment=assignment, round_limit=round_limit)
