"""The modeled player: trust-weighted stochastic message choice.

Beyond the game rules, agents never send more than one message of each
type to the same partner within a game, and an agent that learns who its
expert is immediately sends that expert a request (once). Every other
choice is sampled with probability proportional to

    preference(type) * mean_responsiveness(receiver)

where the preference is alpha for requests, beta for confirmations and
referrals alike, and gamma for negations. Once an agent knows its expert,
alpha is damped to 0.1% of its value for the rest of the game, so requests
to anyone else become rare. An agent with no remaining candidate abstains.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .game import ConfigurationError, Message, MessageType, PlayerId, PlayerView
from .logs import GameLog
from .trust import HYPOTHESES, TrustState, end_of_game_update

ALPHA_DAMPING = 0.001


@dataclass(frozen=True, slots=True)
class Personality:
    """Constant preference weights for the three kinds of act."""

    alpha: float = 1.0  # requests
    beta: float = 5.0   # confirmations and referrals
    gamma: float = 1.0  # negations

    def __post_init__(self) -> None:
        if min(self.alpha, self.beta, self.gamma) < 0:
            raise ConfigurationError("personality traits must be nonnegative")
        if max(self.alpha, self.beta, self.gamma) == 0:
            raise ConfigurationError("at least one personality trait must be positive")


@dataclass(slots=True)
class AgentGameMemory:
    """Within-game state; reset when a new game starts."""

    sent: set[tuple[MessageType, PlayerId]] = field(default_factory=set)

    def record(self, action: Message | None) -> None:
        if action is not None:
            self.sent.add((action.type, action.receiver))


def candidate_weights(
    memory: AgentGameMemory,
    trust: TrustState,
    view: PlayerView,
    personality: Personality,
) -> list[tuple[Message, float]]:
    """All sendable messages this round with their unnormalized weights."""
    sent = memory.sent
    alpha = personality.alpha
    if view.expert is not None:
        alpha *= ALPHA_DAMPING
    candidates: list[tuple[Message, float]] = []
    for y in range(view.n_players):
        if y == view.player or (MessageType.Q, y) in sent:
            continue
        candidates.append((Message(MessageType.Q, view.player, y, view.round), alpha * trust.mean(y)))
    for opt in view.replies:
        if (opt.type, opt.receiver) in sent:
            continue
        pref = personality.beta if opt.type in (MessageType.C, MessageType.R) else personality.gamma
        candidates.append(
            (Message(opt.type, view.player, opt.receiver, view.round, opt.payload), pref * trust.mean(opt.receiver))
        )
    return candidates


def choose_action(
    memory: AgentGameMemory,
    trust: TrustState,
    view: PlayerView,
    personality: Personality,
    rng: np.random.Generator,
) -> Message | None:
    """Pick this round's message, or None to abstain.

    The forced move comes first: an agent that knows its expert and has not
    requested from them yet always does exactly that. Otherwise one
    candidate is sampled proportionally to its weight; an empty or
    zero-weight candidate set means abstain.
    """
    if view.expert is not None and (MessageType.Q, view.expert) not in memory.sent:
        return Message(MessageType.Q, view.player, view.expert, view.round)
    candidates = candidate_weights(memory, trust, view, personality)
    if not candidates:
        return None
    total = 0.0
    for _, w in candidates:
        total += w
    if total <= 0.0:
        return None
    pick = rng.random() * total
    acc = 0.0
    for msg, w in candidates:
        acc += w
        if pick < acc:
            return msg
    return candidates[-1][0]  # guard against float round-off at the top end


class BayesianAgent:
    """One seated player: persistent trust plus per-game memory and policy."""

    def __init__(
        self,
        player: PlayerId,
        n_players: int,
        personality: Personality,
        grid: np.ndarray = HYPOTHESES,
    ):
        self.player = player
        self.personality = personality
        self.trust = TrustState(player, [y for y in range(n_players) if y != player], grid)
        self.memory = AgentGameMemory()

    def begin_game(self) -> None:
        self.memory = AgentGameMemory()

    def act(self, view: PlayerView, rng: np.random.Generator) -> Message | None:
        action = choose_action(self.memory, self.trust, view, self.personality, rng)
        self.memory.record(action)
        return action

    def finish_game(self, log: GameLog) -> None:
        end_of_game_update(self.trust, log, self.player)
