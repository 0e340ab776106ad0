"""Metric tests: adjacency, correlations, reciprocity, curves, reply table."""

import math

import numpy as np
import pytest

from expertgame.analysis import (
    adjacency,
    consecutive_game_correlations,
    compute_metrics,
    degree_preserving_shuffle,
    game_correlations,
    knowledge_curves,
    message_type_fractions,
    offdiagonal,
    per_round_rates,
    reciprocity,
    reply_stats,
)
from expertgame.game import Assignment, Message, MessageType, sample_assignment
from expertgame.logs import GameLog
from expertgame.sim import SeriesConfig, run_series

from oracles import pearson

Q, C, R, N = MessageType.Q, MessageType.C, MessageType.R, MessageType.N

SHIFT5 = Assignment((0, 1, 2, 3, 4), (1, 2, 3, 4, 0))  # expert of y is y+1 mod 5


def log5(messages, rounds=6, scores=()):
    return GameLog(SHIFT5, rounds, list(messages), list(scores))


class TestAdjacency:
    def test_empty_log(self):
        assert np.array_equal(adjacency([log5([])]), np.zeros((5, 5), dtype=int))

    def test_counts(self):
        game = log5(
            [Message(Q, 1, 2, 1), Message(Q, 1, 2, 2), Message(Q, 1, 2, 3), Message(N, 2, 1, 2)]
        )
        matrix = adjacency([game])
        assert matrix[1, 2] == 3 and matrix[2, 1] == 1
        assert matrix.sum() == 4
        assert np.all(np.diag(matrix) == 0)

    def test_type_filter(self):
        game = log5([Message(Q, 1, 2, 1), Message(N, 2, 1, 2)])
        assert adjacency([game], "q").sum() == 1
        assert adjacency([game], "replies")[2, 1] == 1
        assert adjacency([game], {MessageType.N}).sum() == 1
        with pytest.raises(ValueError):
            adjacency([game], "bogus")

    def test_aggregate_is_sum_of_games(self):
        games = [
            log5([Message(Q, 0, 1, 1)]),
            log5([Message(Q, 1, 0, 1)]),
            log5([Message(Q, 0, 1, 1), Message(Q, 2, 3, 1)]),
        ]
        total = adjacency(games)
        summed = sum((adjacency([g]) for g in games), np.zeros((5, 5), dtype=int))
        assert np.array_equal(total, summed)


class TestCorrelations:
    def test_self_correlation_is_one(self):
        rng = np.random.default_rng(0)
        m = rng.integers(0, 5, size=(5, 5))
        np.fill_diagonal(m, 0)
        out = game_correlations([m, m])
        assert out[0, 1] == pytest.approx(1.0)

    def test_two_point_vectors(self):
        a = np.array([[0, 1], [2, 0]])
        # two off-diagonal entries are always perfectly linear
        assert game_correlations([a, 2 * a])[0, 1] == pytest.approx(1.0)
        assert game_correlations([a, a.T])[0, 1] == pytest.approx(-1.0)

    def test_zero_variance_is_missing(self):
        flat = np.ones((4, 4), dtype=int)
        np.fill_diagonal(flat, 0)
        rng = np.random.default_rng(1)
        other = rng.integers(0, 5, size=(4, 4))
        np.fill_diagonal(other, 0)
        assert math.isnan(game_correlations([flat, other])[0, 1])

    def test_matches_independent_pearson(self):
        rng = np.random.default_rng(2)
        a = rng.integers(0, 9, size=(6, 6))
        b = rng.integers(0, 9, size=(6, 6))
        np.fill_diagonal(a, 0)
        np.fill_diagonal(b, 0)
        expected = pearson(list(offdiagonal(a)), list(offdiagonal(b)))
        assert game_correlations([a, b])[0, 1] == pytest.approx(expected, abs=1e-12)


class TestReciprocity:
    def test_symmetric_matrix(self):
        m = np.array([[0, 2, 1], [2, 0, 3], [1, 3, 0]])
        assert reciprocity(m) == pytest.approx(1.0)

    def test_pure_cycle_is_negative(self):
        # one-directional ring: hand-computed correlation is -1/(n-2)
        for n in (3, 4, 6):
            m = np.zeros((n, n), dtype=int)
            for i in range(n):
                m[i, (i + 1) % n] = 1
            expected = pearson(list(offdiagonal(m)), list(offdiagonal(m.T)))
            assert reciprocity(m) == pytest.approx(expected, abs=1e-12)
            assert reciprocity(m) == pytest.approx(-1.0 / (n - 2), abs=1e-12)
            assert reciprocity(m) < 0

    def test_zero_variance_missing(self):
        m = np.ones((4, 4), dtype=int)
        np.fill_diagonal(m, 0)
        assert math.isnan(reciprocity(m))

    def test_random_matrices_center_on_zero(self):
        rng = np.random.default_rng(3)
        values = []
        for _ in range(1000):
            m = rng.integers(0, 10, size=(6, 6))
            np.fill_diagonal(m, 0)
            values.append(reciprocity(m))
        values = np.array(values)
        # independent entries: mean is ~0 relative to the spread of the null
        assert abs(values.mean()) < 3 * values.std()
        # precisely: correlating a vector against a permutation of itself
        # biases the sample mean to -1/(m-1) for m off-diagonal entries
        m_entries = 30
        se = values.std() / math.sqrt(len(values))
        assert abs(values.mean() - (-1 / (m_entries - 1))) < 4 * se

    def test_degree_preserving_shuffle_keeps_margins(self):
        rng = np.random.default_rng(4)
        m = rng.integers(0, 6, size=(6, 6))
        np.fill_diagonal(m, 0)
        shuffled = degree_preserving_shuffle(m, rng)
        assert np.array_equal(shuffled.sum(axis=0), m.sum(axis=0))
        assert np.array_equal(shuffled.sum(axis=1), m.sum(axis=1))
        assert np.all(np.diag(shuffled) == 0)
        assert not np.array_equal(shuffled, m)  # sweeps actually moved mass


class TestPerRoundRates:
    def test_partition_of_totals(self):
        series = run_series(SeriesConfig(n_players=5, n_games=3, round_mean=7, master_seed=21))
        for game, curve in zip(series.games, per_round_rates(series.games).per_game):
            assert curve.sum() * game.n_players == pytest.approx(len(game.messages))

    def test_silent_game(self):
        rates = per_round_rates([log5([Message(Q, 0, 1, 1)], rounds=3)])
        assert np.all(rates.positive == 0) and np.all(rates.negative == 0)
        assert rates.q[0] == pytest.approx(1 / 5)

    def test_mean_over_games_with_round(self):
        short = log5([Message(Q, 0, 1, 1)], rounds=2)
        long = log5([Message(Q, 0, 1, 1), Message(Q, 0, 2, 3)], rounds=4)
        rates = per_round_rates([short, long])
        assert list(rates.n_games_at_round) == [2, 2, 1, 1]
        assert rates.q[2] == pytest.approx(1 / 5)  # only the long game has round 3


class TestKnowledgeCurves:
    def test_prior_to_play_nothing_is_known(self):
        curves = knowledge_curves([log5([Message(Q, 0, 1, 1)], rounds=3)])
        assert curves.overall[0] == 0.0 and curves.relevant[0] == 0.0

    def test_single_request_contribution(self):
        # one delivered request: receiver knows 1 of 4 others; the sender learns nothing
        curves = knowledge_curves([log5([Message(Q, 0, 1, 1)], rounds=2)])
        assert curves.overall[1] == pytest.approx((1 / 4) / 5)
        assert curves.relevant[1] == 0.0  # 0's expertise does not match 1's task

    def test_request_from_own_expert_is_relevant(self):
        # player 2 holds expertise 2, the match of player 1's task
        curves = knowledge_curves([log5([Message(Q, 2, 1, 1)], rounds=2)])
        assert curves.relevant[1] == pytest.approx(1 / 5)

    def test_referral_sets_relevant_knowledge(self):
        msgs = [
            Message(Q, 0, 2, 1),
            Message(Q, 1, 2, 1),
            Message(R, 2, 0, 2, payload=1),
        ]
        curves = knowledge_curves([log5(msgs, rounds=3)])
        assert curves.relevant[2] >= 1 / 5
        assert np.all(np.diff(curves.relevant) >= 0)

    def test_curves_monotone_on_model_logs(self):
        series = run_series(SeriesConfig(n_players=6, n_games=3, round_mean=8, master_seed=17))
        curves = knowledge_curves(series.games)
        assert np.all(np.diff(curves.overall) >= -1e-12)
        assert np.all(np.diff(curves.relevant) >= -1e-12)
        assert np.all(curves.relevant <= 1.0 + 1e-12)


class TestReplyStats:
    def crafted(self):
        """Five first-request events with every outcome represented.

        (0->3) answered N at lag 2; (1->2) answered C at lag 3; (3->0)
        answered R at lag 4; (4->0) never answered though 0 is 4's expert;
        (2->4) never answered and 4 never learns 2's expert.
        """
        msgs = [
            Message(Q, 0, 3, 1),
            Message(Q, 1, 2, 1),
            Message(Q, 3, 0, 1),
            Message(Q, 4, 0, 1),
            Message(Q, 2, 4, 2),
            Message(N, 3, 0, 3),
            Message(C, 2, 1, 4),
            Message(R, 0, 3, 5, payload=4),
        ]
        return log5(msgs, rounds=6, scores=[(1, 4)])

    def test_crafted_log_hand_counts(self):
        stats = reply_stats([self.crafted()])
        assert stats.n_events == 5
        assert stats.lag_negative == pytest.approx(2.0)
        assert stats.lag_positive == pytest.approx(3.5)
        assert stats.rate_negative == pytest.approx(0.2)
        assert stats.rate_positive == pytest.approx(0.4)
        # of the two silent events one responder held the answer ...
        assert stats.rate_known_given_noreply == pytest.approx(1 / 2)
        # ... and of the three answer-holding events one stayed silent
        assert stats.rate_noreply_given_knowledge == pytest.approx(1 / 3)

    def test_instant_confirmations(self):
        msgs = [Message(Q, 0, 1, 1), Message(C, 1, 0, 2)]
        stats = reply_stats([log5(msgs, rounds=4, scores=[(0, 2)])])
        assert stats.lag_positive == pytest.approx(1.0)
        assert stats.rate_positive == pytest.approx(1.0)
        assert stats.rate_negative == 0.0
        assert math.isnan(stats.lag_negative)
        assert math.isnan(stats.rate_known_given_noreply)
        assert stats.rate_noreply_given_knowledge == 0.0

    def test_no_requests_all_missing(self):
        stats = reply_stats([log5([])])
        assert stats.n_events == 0
        assert math.isnan(stats.rate_negative) and math.isnan(stats.lag_positive)

    def test_referral_after_negation_counts_in_both_lag_rows(self):
        msgs = [
            Message(Q, 0, 2, 1),
            Message(N, 2, 0, 2),
            Message(Q, 1, 2, 3),  # expert of 0 reveals itself to 2
            Message(R, 2, 0, 5, payload=1),
        ]
        stats = reply_stats([log5(msgs, rounds=6)])
        assert stats.lag_negative == pytest.approx(1.0)
        assert stats.lag_positive == pytest.approx(4.0)
        # rates follow the first reply only
        assert stats.rate_negative == pytest.approx(0.5)  # events: (0->2) N-first, (1->2) silent
        assert stats.rate_positive == 0.0


class TestMessageFractions:
    def test_counts(self):
        msgs = [
            Message(Q, 0, 1, 1),
            Message(Q, 2, 1, 1),
            Message(R, 1, 2, 2, payload=3),
            Message(N, 1, 0, 3),
        ]
        game = GameLog(Assignment((0, 1, 2, 3), (1, 2, 3, 0)), 4, msgs, [])
        assert message_type_fractions([game]) == pytest.approx((0.5, 0.25, 0.25))

    def test_all_requests(self):
        assert message_type_fractions([log5([Message(Q, 0, 1, 1)])]) == pytest.approx((1.0, 0.0, 0.0))

    def test_empty_is_missing(self):
        assert all(math.isnan(v) for v in message_type_fractions([log5([])]))


def test_metrics_bundle_and_consecutive_correlations():
    series = run_series(SeriesConfig(n_players=6, n_games=4, round_mean=8, master_seed=2))
    bundle = compute_metrics(series.games)
    assert len(bundle.per_game_adjacency) == 4
    assert np.array_equal(
        bundle.aggregate_adjacency, sum(bundle.per_game_adjacency, np.zeros((6, 6), dtype=int))
    )
    assert bundle.correlations.shape == (4, 4)
    cors = consecutive_game_correlations(series.games)
    assert len(cors) == 3
    for g in range(3):
        assert cors[g] == pytest.approx(bundle.correlations[g, g + 1], nan_ok=True)


def test_relabeling_invariance():
    """Renaming players identically in both games leaves the metrics unchanged."""
    rng = np.random.default_rng(31)
    a = rng.integers(0, 7, size=(6, 6))
    b = rng.integers(0, 7, size=(6, 6))
    np.fill_diagonal(a, 0)
    np.fill_diagonal(b, 0)
    perm = rng.permutation(6)
    pa = a[np.ix_(perm, perm)]
    pb = b[np.ix_(perm, perm)]
    assert game_correlations([a, b])[0, 1] == pytest.approx(game_correlations([pa, pb])[0, 1])
    assert reciprocity(a) == pytest.approx(reciprocity(pa))
