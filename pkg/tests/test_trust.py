"""Grid-Bayes responsiveness inference tests against plain-Python oracles."""

import numpy as np
import pytest

from expertgame.game import Assignment, Message, MessageType
from expertgame.logs import GameLog
from expertgame.trust import (
    HYPOTHESES,
    InvalidObservationError,
    Observation,
    TrustState,
    end_of_game_update,
    extract_observations,
    likelihood,
    likelihood_vector,
    mean_responsiveness,
    uniform_prior,
    update_posterior,
)

from oracles import grid_21, grid_mean, grid_posterior

Q, C, R, N = MessageType.Q, MessageType.C, MessageType.R, MessageType.N

# player i holds expertise i; tasks shifted: expert of y is y+1 mod 3
SHIFT3 = Assignment((0, 1, 2), (1, 2, 0))


def game(messages, rounds):
    return GameLog(SHIFT3, rounds, messages, [])


class TestLikelihood:
    def test_direct_values(self):
        assert likelihood(0.5, Observation(1, 3, True)) == pytest.approx(0.125)
        assert likelihood(1.0, Observation(1, 1, True)) == pytest.approx(1.0)
        assert likelihood(0.2, Observation(1, 4, False)) == pytest.approx(0.4096)

    def test_invalid_waiting_time(self):
        with pytest.raises(InvalidObservationError):
            likelihood(0.5, Observation(1, 0, True))
        with pytest.raises(InvalidObservationError):
            likelihood_vector(Observation(1, -3, False))

    def test_waiting_time_distribution_normalizes(self):
        # replied-by-K plus censored-at-K probabilities telescope to one
        for theta in HYPOTHESES:
            for horizon in (1, 2, 5, 50):
                total = sum(
                    likelihood(theta, Observation(0, k, True)) for k in range(1, horizon + 1)
                )
                total += likelihood(theta, Observation(0, horizon, False))
                assert abs(total - 1.0) < 1e-12


class TestPosterior:
    def test_grid_is_the_21_point_lattice(self):
        assert np.allclose(HYPOTHESES, grid_21())
        assert len(HYPOTHESES) == 21
        assert HYPOTHESES[0] == 0.0 and HYPOTHESES[-1] == 1.0

    def test_instant_reply_from_uniform(self):
        post = update_posterior(uniform_prior(), Observation(1, 1, True))
        assert abs(post.sum() - 1.0) < 1e-12
        # posterior proportional to theta: mean is 7.175 / 10.5
        assert mean_responsiveness(post) == pytest.approx(7.175 / 10.5, abs=1e-12)
        oracle = grid_posterior([1 / 21] * 21, [(1, True)])
        assert np.allclose(post, oracle, atol=1e-12)

    def test_point_mass_is_fixed(self):
        prior = np.zeros(21)
        prior[10] = 1.0  # theta = 0.5
        post = update_posterior(prior, Observation(1, 4, False))
        assert np.allclose(post, prior)

    def test_long_censoring_concentrates_on_zero(self):
        post = update_posterior(uniform_prior(), Observation(1, 100, False))
        oracle = grid_posterior([1 / 21] * 21, [(100, False)])
        assert np.allclose(post, oracle, atol=1e-12)
        assert post[0] == pytest.approx(0.994, abs=1e-3)

    def test_posterior_is_a_distribution(self):
        rng = np.random.default_rng(3)
        dist = uniform_prior()
        for _ in range(50):
            k = int(rng.integers(1, 12))
            dist = update_posterior(dist, Observation(1, k, bool(rng.integers(0, 2))))
            assert abs(dist.sum() - 1.0) < 1e-12
            assert np.all(dist >= 0)

    def test_incremental_equals_batch(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            obs = [(int(rng.integers(1, 15)), bool(rng.integers(0, 2))) for _ in range(int(rng.integers(1, 8)))]
            dist = uniform_prior()
            for k, replied in obs:
                dist = update_posterior(dist, Observation(1, k, replied))
            assert np.allclose(dist, grid_posterior([1 / 21] * 21, obs), atol=1e-10)


class TestMeanResponsiveness:
    def test_uniform_grid_mean(self):
        assert mean_responsiveness(uniform_prior()) == pytest.approx(0.5)

    def test_point_mass(self):
        dist = np.zeros(21)
        dist[15] = 1.0  # theta = 0.75
        assert mean_responsiveness(dist) == pytest.approx(0.75)

    def test_matches_oracle(self):
        rng = np.random.default_rng(5)
        raw = rng.random(21)
        dist = raw / raw.sum()
        assert mean_responsiveness(dist) == pytest.approx(grid_mean(list(dist)), abs=1e-12)


class TestExtractObservations:
    def test_reply_lag(self):
        log = game([Message(Q, 0, 2, 2), Message(N, 2, 0, 5)], rounds=6)
        assert extract_observations(log, 0) == [Observation(2, 3, True)]

    def test_referral_after_negation_is_instant(self):
        log = game(
            [
                Message(Q, 0, 2, 2),
                Message(N, 2, 0, 4),
                Message(Q, 1, 2, 5),  # the expert of 0 reveals itself to 2
                Message(R, 2, 0, 9, payload=1),
            ],
            rounds=10,
        )
        assert extract_observations(log, 0) == [Observation(2, 1, True)]

    def test_only_first_request_counts(self):
        log = game([Message(Q, 0, 2, 3), Message(Q, 0, 2, 5), Message(N, 2, 0, 6)], rounds=8)
        assert extract_observations(log, 0) == [Observation(2, 3, True)]

    def test_unanswered_request_is_censored(self):
        log = game([Message(Q, 0, 2, 2)], rounds=6)
        assert extract_observations(log, 0) == [Observation(2, 4, False)]

    def test_final_round_request_carries_no_information(self):
        log = game([Message(Q, 0, 2, 6)], rounds=6)
        assert extract_observations(log, 0) == []

    def test_observations_are_per_partner(self):
        log = game(
            [Message(Q, 0, 1, 1), Message(Q, 0, 2, 2), Message(C, 1, 0, 3)],
            rounds=5,
        )
        assert extract_observations(log, 0) == [
            Observation(1, 2, True),
            Observation(2, 3, False),
        ]


class TestEndOfGameUpdate:
    def test_no_requests_no_change(self):
        trust = TrustState(0, [1, 2])
        before = {y: p.copy() for y, p in trust.probs.items()}
        end_of_game_update(trust, game([Message(Q, 1, 2, 1)], rounds=4), 0)
        for y, p in trust.probs.items():
            assert np.array_equal(p, before[y])

    def test_single_partner_updated(self):
        trust = TrustState(0, [1, 2])
        log = game([Message(Q, 0, 1, 1), Message(C, 1, 0, 2)], rounds=5)
        end_of_game_update(trust, log, 0)
        assert trust.mean(1) == pytest.approx(7.175 / 10.5, abs=1e-12)
        assert trust.mean(2) == pytest.approx(0.5)

    def test_repeated_evidence_accumulates(self):
        trust = TrustState(0, [1, 2])
        log = game([Message(Q, 0, 1, 1), Message(C, 1, 0, 2)], rounds=5)
        end_of_game_update(trust, log, 0)
        first = trust.mean(1)
        end_of_game_update(trust, log, 0)
        assert trust.mean(1) > first


def test_convergence_against_scripted_partner():
    """Posterior mean approaches a scripted reply probability of 0.6."""
    p_true = 0.6
    trials, games_per_trial, horizon = 200, 50, 12
    hits = 0
    rng = np.random.default_rng(606)
    for _ in range(trials):
        dist = uniform_prior()
        for _ in range(games_per_trial):
            k = int(rng.geometric(p_true))  # rounds until first reply
            budget = horizon - 1  # request sent in round 1
            if k <= budget:
                dist = update_posterior(dist, Observation(1, k, True))
            else:
                dist = update_posterior(dist, Observation(1, budget, False))
        if abs(mean_responsiveness(dist) - p_true) <= 0.1:
            hits += 1
    assert hits >= 0.95 * trials
