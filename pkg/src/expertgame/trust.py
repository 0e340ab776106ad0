"""Per-partner responsiveness inference on a discrete hypothesis grid.

Each agent models every partner's probability theta of replying in the
next round as a Bernoulli success rate and keeps a discrete posterior over
the 21 hypotheses theta = 0.05 * n, n = 0..20. A reply observed k rounds
after the request has the waiting-time likelihood (1-theta)^(k-1) * theta;
a request still unanswered when the game ends k rounds later is censored
with likelihood (1-theta)^k. Posteriors update between games and carry
over as the next game's priors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import ExpertGameError, Message, MessageType, PlayerId
from .logs import GameLog

GRID_STEP = 0.05
N_HYPOTHESES = 21

HYPOTHESES = np.round(np.arange(N_HYPOTHESES) * GRID_STEP, 10)
HYPOTHESES.setflags(write=False)


class InvalidObservationError(ExpertGameError):
    """Observation with a non-positive waiting time."""


@dataclass(frozen=True, slots=True)
class Observation:
    """Outcome of the first request to one partner within one game.

    ``k`` counts rounds elapsed from the first request either to the first
    reply (``replied=True``; a reply in the very next round gives k=1) or
    to the end of the game (``replied=False``).
    """

    partner: PlayerId
    k: int
    replied: bool


def likelihood(theta: float, obs: Observation) -> float:
    """P(observation | theta) from the Bernoulli waiting-time distribution."""
    if obs.k < 1:
        raise InvalidObservationError(f"waiting time must be at least one round, got {obs.k}")
    if obs.replied:
        return (1.0 - theta) ** (obs.k - 1) * theta
    return (1.0 - theta) ** obs.k


def likelihood_vector(obs: Observation, grid: np.ndarray = HYPOTHESES) -> np.ndarray:
    if obs.k < 1:
        raise InvalidObservationError(f"waiting time must be at least one round, got {obs.k}")
    miss = 1.0 - grid
    if obs.replied:
        return miss ** (obs.k - 1) * grid
    return miss ** obs.k


def uniform_prior(n: int = N_HYPOTHESES) -> np.ndarray:
    return np.full(n, 1.0 / n)


def update_posterior(prior: np.ndarray, obs: Observation, grid: np.ndarray = HYPOTHESES) -> np.ndarray:
    """Bayes update of a grid distribution with one observation.

    posterior(theta) is proportional to P(obs | theta) * prior(theta),
    renormalized to sum to one.
    """
    unnormalized = prior * likelihood_vector(obs, grid)
    total = unnormalized.sum()
    if total <= 0.0:
        raise ExpertGameError("posterior vanished on the whole grid")
    return unnormalized / total


def mean_responsiveness(dist: np.ndarray, grid: np.ndarray = HYPOTHESES) -> float:
    """Expected reply probability: the probability-weighted grid average."""
    return float(np.dot(grid, dist))


def extract_observations(log: GameLog, player: PlayerId) -> list[Observation]:
    """Waiting-time observations for `player` from one finished game.

    Only the first request to each partner and that partner's first reply
    count. A referral sent after an earlier negation is treated as an
    instant reply (k=1) no matter when it arrived. Requests sent in the
    final round leave no time to answer and yield no observation.
    """
    first_q: dict[PlayerId, int] = {}
    first_reply: dict[PlayerId, tuple[int, MessageType]] = {}
    later_referral: set[PlayerId] = set()
    for m in log.messages:
        if m.type is MessageType.Q:
            if m.sender == player and m.receiver not in first_q:
                first_q[m.receiver] = m.round_sent
        elif m.receiver == player:
            y = m.sender
            if y not in first_reply:
                first_reply[y] = (m.round_sent, m.type)
            elif m.type is MessageType.R:
                later_referral.add(y)

    observations = []
    for y, t_q in sorted(first_q.items()):
        if y in first_reply:
            t_r, kind = first_reply[y]
            if kind is MessageType.N and y in later_referral:
                k = 1
            else:
                k = t_r - t_q
            observations.append(Observation(y, k, True))
        else:
            k = log.rounds - t_q
            if k >= 1:
                observations.append(Observation(y, k, False))
    return observations


class TrustState:
    """One agent's posterior over every partner's responsiveness.

    Persists across the games of a series; distributions start uniform and
    each finished game updates only the partners that were asked.
    """

    def __init__(self, player: PlayerId, partners, grid: np.ndarray = HYPOTHESES):
        self.player = player
        self.grid = grid
        self.probs: dict[PlayerId, np.ndarray] = {y: uniform_prior(len(grid)) for y in partners}
        self._means: dict[PlayerId, float] = {y: mean_responsiveness(p, grid) for y, p in self.probs.items()}

    def posterior(self, partner: PlayerId) -> np.ndarray:
        return self.probs[partner]

    def mean(self, partner: PlayerId) -> float:
        return self._means[partner]

    def set_posterior(self, partner: PlayerId, dist: np.ndarray) -> None:
        self.probs[partner] = dist
        self._means[partner] = mean_responsiveness(dist, self.grid)

    def observe(self, obs: Observation) -> None:
        self.set_posterior(obs.partner, update_posterior(self.probs[obs.partner], obs, self.grid))


def end_of_game_update(trust: TrustState, log: GameLog, player: PlayerId) -> TrustState:
    """Fold one finished game into the trust state (between-games update)."""
    for obs in extract_observations(log, player):
        trust.observe(obs)
    return trust
