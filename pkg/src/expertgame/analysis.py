"""Network and time-series metrics over game logs.

Everything here is a pure function of parsed logs: communication adjacency
matrices and their between-game correlations, reciprocity, per-round
message-rate curves split by message class, knowledge acquisition curves,
the reply-lag/rate table, and message-type fractions. "Positive" replies
bundle confirmations and referrals; negations are "negative".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .game import MessageType
from .logs import GameLog

POSITIVE_TYPES = frozenset((MessageType.C, MessageType.R))

_FILTERS = {
    "all": frozenset(MessageType),
    "q": frozenset((MessageType.Q,)),
    "replies": frozenset((MessageType.C, MessageType.R, MessageType.N)),
}


def _as_type_set(type_filter) -> frozenset:
    if type_filter is None:
        return _FILTERS["all"]
    if isinstance(type_filter, str):
        try:
            return _FILTERS[type_filter]
        except KeyError:
            raise ValueError(f"unknown type filter {type_filter!r}; use one of {sorted(_FILTERS)}") from None
    return frozenset(type_filter)


def adjacency(games: Iterable[GameLog], type_filter=None) -> np.ndarray:
    """Message counts from sender (row) to receiver (column).

    Sums over all games given; the diagonal is structurally zero. An empty
    selection yields a zero matrix.
    """
    games = list(games)
    if not games:
        return np.zeros((0, 0), dtype=int)
    types = _as_type_set(type_filter)
    n = games[0].n_players
    matrix = np.zeros((n, n), dtype=int)
    for game in games:
        if game.n_players != n:
            raise ValueError("all games must have the same player count")
        for m in game.messages:
            if m.type in types:
                matrix[m.sender, m.receiver] += 1
    return matrix


def offdiagonal(matrix: np.ndarray) -> np.ndarray:
    """Off-diagonal entries flattened in fixed row-major order."""
    n = matrix.shape[0]
    mask = ~np.eye(n, dtype=bool)
    return matrix[mask].astype(float)


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation; NaN when either side has zero variance."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xd = x - x.mean()
    yd = y - y.mean()
    denom = np.sqrt((xd * xd).sum() * (yd * yd).sum())
    if denom == 0.0:
        return float("nan")
    return float((xd * yd).sum() / denom)


def game_correlations(per_game_matrices: Sequence[np.ndarray]) -> np.ndarray:
    """Pearson correlations between games' off-diagonal flow vectors.

    Entry (g, h) correlates game g against game h; the diagonal is 1 and
    zero-variance comparisons are reported as NaN, not zero.
    """
    if len(per_game_matrices) < 2:
        raise ValueError("need at least two games to correlate")
    vecs = [offdiagonal(m) for m in per_game_matrices]
    k = len(vecs)
    out = np.eye(k)
    for g in range(k):
        for h in range(g + 1, k):
            out[g, h] = out[h, g] = _pearson(vecs[g], vecs[h])
    return out


def reciprocity(matrix: np.ndarray) -> float:
    """Symmetry of flows: correlation between the matrix and its transpose.

    Computed over off-diagonal entries only; +1 for perfectly symmetric
    communication, NaN when the flows have no variance.
    """
    if matrix.shape[0] < 3:
        raise ValueError("reciprocity needs at least three players")
    return _pearson(offdiagonal(matrix), offdiagonal(matrix.T))


def degree_preserving_shuffle(matrix: np.ndarray, rng: np.random.Generator, sweeps: int = 10) -> np.ndarray:
    """Randomize message units while keeping every row and column sum.

    Repeatedly swaps the endpoints of two random unit edges
    ((i,j),(k,l) -> (i,l),(k,j)), rejecting swaps that would place weight on
    the diagonal. Serves as the null model for the reciprocity comparison.
    """
    n = matrix.shape[0]
    edges: list[list[int]] = []
    for i in range(n):
        for j in range(n):
            edges.extend([i, j] for _ in range(int(matrix[i, j])))
    m = len(edges)
    if m < 2:
        return matrix.copy()
    for _ in range(sweeps * m):
        a, b = rng.integers(0, m, size=2)
        if a == b:
            continue
        (i, j), (k, l) = edges[a], edges[b]
        if i == l or k == j:
            continue
        edges[a][1], edges[b][1] = l, j
    out = np.zeros_like(matrix)
    for i, j in edges:
        out[i, j] += 1
    return out


@dataclass(slots=True)
class RateCurves:
    """Messages per person per round, split by class.

    `per_game` holds one (rounds, 3) array per game with columns
    (Q, positive, negative); `mean` averages each round index over the
    games that reached it.
    """

    per_game: list[np.ndarray]
    mean: np.ndarray
    n_games_at_round: np.ndarray

    @property
    def q(self) -> np.ndarray:
        return self.mean[:, 0]

    @property
    def positive(self) -> np.ndarray:
        return self.mean[:, 1]

    @property
    def negative(self) -> np.ndarray:
        return self.mean[:, 2]


def per_round_rates(games: Sequence[GameLog]) -> RateCurves:
    per_game = []
    for game in games:
        counts = np.zeros((game.rounds, 3))
        for m in game.messages:
            if m.type is MessageType.Q:
                col = 0
            elif m.type in POSITIVE_TYPES:
                col = 1
            else:
                col = 2
            counts[m.round_sent - 1, col] += 1
        per_game.append(counts / game.n_players)
    max_rounds = max((g.rounds for g in games), default=0)
    mean = np.zeros((max_rounds, 3))
    n_at = np.zeros(max_rounds, dtype=int)
    for curve in per_game:
        r = curve.shape[0]
        mean[:r] += curve
        n_at[:r] += 1
    with np.errstate(invalid="ignore"):
        mean = mean / np.maximum(n_at, 1)[:, None]
    return RateCurves(per_game, mean, n_at)


@dataclass(slots=True)
class KnowledgeCurves:
    """Round-indexed knowledge fractions, index 0 = before any delivery.

    `overall[t]` is the mean fraction of other players whose expertise a
    player knows after round t; `relevant[t]` is the fraction of players
    who know who their own expert is (players already confirmed count as
    knowing). Averages cover the games that reached each round.
    """

    overall: np.ndarray
    relevant: np.ndarray
    n_games_at_round: np.ndarray


def _knowledge_by_round(game: GameLog) -> tuple[np.ndarray, np.ndarray]:
    n = game.n_players
    expertise_of = game.assignment.expertise_of
    task_of = game.assignment.task_of
    facts: list[set[int]] = [set() for _ in range(n)]
    knows_expert = [False] * n
    overall = np.zeros(game.rounds + 1)
    relevant = np.zeros(game.rounds + 1)
    by_round = game.messages_by_round()
    for t in range(1, game.rounds + 1):
        for m in by_round[t - 1]:
            recv = m.receiver
            if m.type is MessageType.Q:
                facts[recv].add(m.sender)
                if expertise_of[m.sender] == task_of[recv]:
                    knows_expert[recv] = True
            elif m.type is MessageType.C:
                knows_expert[recv] = True
            elif m.type is MessageType.R:
                knows_expert[recv] = True
        overall[t] = sum(len(f) for f in facts) / (n * (n - 1))
        relevant[t] = sum(knows_expert) / n
    return overall, relevant


def knowledge_curves(games: Sequence[GameLog]) -> KnowledgeCurves:
    max_rounds = max((g.rounds for g in games), default=0)
    overall = np.zeros(max_rounds + 1)
    relevant = np.zeros(max_rounds + 1)
    n_at = np.zeros(max_rounds + 1, dtype=int)
    for game in games:
        o, r = _knowledge_by_round(game)
        overall[: len(o)] += o
        relevant[: len(r)] += r
        n_at[: len(o)] += 1
    scale = np.maximum(n_at, 1)
    return KnowledgeCurves(overall / scale, relevant / scale, n_at)


@dataclass(slots=True)
class ReplyStats:
    """The reply-lag and reply-rate table over first-request events.

    Every ordered pair (requester, responder) with at least one request
    counts once per game; waiting times are measured from the first
    request. Lags average over every reply of the class, so a referral
    following an earlier negation contributes to both rows; rates are
    fractions of events whose first reply was of that class.

    The unanswered-despite-knowledge phenomenon is reported under both
    possible conditionings: `rate_known_given_noreply` is the fraction of
    never-answered events where the responder held the answer by game end
    (the reply-table row), while `rate_noreply_given_knowledge` is the
    fraction of answer-holding events that were never answered. Holding
    the answer means being the requester's expert or having learned that
    expert's expertise through the expert's own request.
    """

    lag_negative: float
    lag_positive: float
    rate_negative: float
    rate_positive: float
    rate_known_given_noreply: float
    rate_noreply_given_knowledge: float
    n_events: int


def reply_stats(games: Iterable[GameLog]) -> ReplyStats:
    lags_n: list[int] = []
    lags_y: list[int] = []
    n_events = 0
    n_first_n = 0
    n_first_y = 0
    n_silent = 0
    n_with_knowledge = 0
    n_silent_with_knowledge = 0
    for game in games:
        expert_of = game.assignment.expert_of
        first_q: dict[tuple[int, int], int] = {}
        replies: dict[tuple[int, int], list[tuple[int, MessageType]]] = {}
        asked: dict[int, set[int]] = {}
        for m in game.messages:
            if m.type is MessageType.Q:
                first_q.setdefault((m.sender, m.receiver), m.round_sent)
                asked.setdefault(m.sender, set()).add(m.receiver)
            else:
                replies.setdefault((m.receiver, m.sender), []).append((m.round_sent, m.type))
        for (requester, responder), t_q in first_q.items():
            n_events += 1
            pair_replies = replies.get((requester, responder))
            if pair_replies:
                if pair_replies[0][1] is MessageType.N:
                    n_first_n += 1
                else:
                    n_first_y += 1
                for t_r, kind in pair_replies:
                    (lags_n if kind is MessageType.N else lags_y).append(t_r - t_q)
            else:
                n_silent += 1
            expert = expert_of[requester]
            possessed = responder == expert or responder in asked.get(expert, ())
            if possessed:
                n_with_knowledge += 1
                if not pair_replies:
                    n_silent_with_knowledge += 1

    def _mean(values: list[int]) -> float:
        return float(np.mean(values)) if values else float("nan")

    def _rate(count: int, total: int) -> float:
        return count / total if total else float("nan")

    return ReplyStats(
        lag_negative=_mean(lags_n),
        lag_positive=_mean(lags_y),
        rate_negative=_rate(n_first_n, n_events),
        rate_positive=_rate(n_first_y, n_events),
        rate_known_given_noreply=_rate(n_silent_with_knowledge, n_silent),
        rate_noreply_given_knowledge=_rate(n_silent_with_knowledge, n_with_knowledge),
        n_events=n_events,
    )


def message_type_fractions(games: Iterable[GameLog]) -> tuple[float, float, float]:
    """Fractions of requests, positive replies and negations; NaN if empty."""
    counts = np.zeros(3)
    for game in games:
        for m in game.messages:
            if m.type is MessageType.Q:
                counts[0] += 1
            elif m.type in POSITIVE_TYPES:
                counts[1] += 1
            else:
                counts[2] += 1
    total = counts.sum()
    if total == 0:
        return (float("nan"),) * 3
    q, y, neg = counts / total
    return float(q), float(y), float(neg)


@dataclass(slots=True)
class MetricsBundle:
    """Every metric of one series, computed from its game logs."""

    per_game_adjacency: list[np.ndarray]
    aggregate_adjacency: np.ndarray
    correlations: np.ndarray
    reciprocity_aggregate: float
    rates: RateCurves
    knowledge: KnowledgeCurves
    reply: ReplyStats
    fractions: tuple[float, float, float]


def compute_metrics(games: Sequence[GameLog], type_filter=None) -> MetricsBundle:
    per_game = [adjacency([g], type_filter) for g in games]
    aggregate = sum(per_game, np.zeros_like(per_game[0]))
    return MetricsBundle(
        per_game_adjacency=per_game,
        aggregate_adjacency=aggregate,
        correlations=game_correlations(per_game) if len(per_game) >= 2 else np.ones((1, 1)),
        reciprocity_aggregate=reciprocity(aggregate),
        rates=per_round_rates(games),
        knowledge=knowledge_curves(games),
        reply=reply_stats(games),
        fractions=message_type_fractions(games),
    )


def consecutive_game_correlations(games: Sequence[GameLog], type_filter=None) -> list[float]:
    """Correlations between each game's flows and the next game's."""
    per_game = [adjacency([g], type_filter) for g in games]
    return [
        _pearson(offdiagonal(per_game[g]), offdiagonal(per_game[g + 1]))
        for g in range(len(per_game) - 1)
    ]
