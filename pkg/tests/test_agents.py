"""Choice-policy tests: weights, forced moves, repetition bans, invariances."""

import numpy as np
import pytest

from expertgame.agents import (
    ALPHA_DAMPING,
    AgentGameMemory,
    BayesianAgent,
    Personality,
    candidate_weights,
    choose_action,
)
from expertgame.game import (
    Assignment,
    ConfigurationError,
    Message,
    MessageType,
    new_game,
    sample_assignment,
)
from expertgame.trust import TrustState

Q, C, R, N = MessageType.Q, MessageType.C, MessageType.R, MessageType.N

SHIFT4 = Assignment((0, 1, 2, 3), (1, 2, 3, 0))


def make_trust(player, means):
    """TrustState with point-mass posteriors pinned at the requested means."""
    trust = TrustState(player, list(means))
    for partner, mean in means.items():
        idx = int(round(mean / 0.05))
        dist = np.zeros(21)
        dist[idx] = 1.0
        trust.set_posterior(partner, dist)
        assert trust.mean(partner) == pytest.approx(mean)
    return trust


class TestPersonality:
    def test_negative_trait_rejected(self):
        with pytest.raises(ConfigurationError):
            Personality(-1.0, 5.0, 1.0)

    def test_all_zero_rejected(self):
        with pytest.raises(ConfigurationError):
            Personality(0.0, 0.0, 0.0)


class TestCandidateWeights:
    def test_request_versus_negation_weights(self):
        # one remaining request target (mean 0.4) and one negation (mean 0.2)
        state = new_game(SHIFT4, 9)
        state.stage_action(2, Message(Q, 2, 0, 1))
        state.resolve_round()
        memory = AgentGameMemory({(Q, 2), (Q, 3)})
        trust = make_trust(0, {1: 0.4, 2: 0.2, 3: 0.9})
        weights = candidate_weights(memory, trust, state.player_view(0), Personality(1, 5, 1))
        by_action = {(m.type, m.receiver): w for m, w in weights}
        assert by_action == {(Q, 1): pytest.approx(0.4), (N, 2): pytest.approx(0.2)}
        # normalized choice probabilities are 2/3 and 1/3
        total = sum(by_action.values())
        assert by_action[(Q, 1)] / total == pytest.approx(2 / 3)

    def test_confirmation_and_referral_share_beta(self):
        # five players, expert of y is y+1: player 1 ends up with all three reply kinds
        state = new_game(Assignment((0, 1, 2, 3, 4), (1, 2, 3, 4, 0)), 9)
        state.stage_action(0, Message(Q, 0, 1, 1))  # 1 is 0's expert: C candidate
        state.stage_action(4, Message(Q, 4, 1, 1))  # 0 is 4's expert and asked 1: R candidate
        state.stage_action(2, Message(Q, 2, 1, 1))  # 2's expert (3) is unknown to 1: N candidate
        state.resolve_round()
        memory = AgentGameMemory({(Q, y) for y in (0, 2, 3, 4)})
        trust = make_trust(1, {0: 0.5, 2: 0.5, 3: 0.5, 4: 0.5})
        weights = candidate_weights(memory, trust, state.player_view(1), Personality(1, 5, 2))
        by_action = {(m.type, m.receiver): w for m, w in weights}
        assert by_action[(C, 0)] == pytest.approx(5 * 0.5)
        assert by_action[(R, 4)] == pytest.approx(5 * 0.5)
        assert by_action[(N, 2)] == pytest.approx(2 * 0.5)

    def test_alpha_damped_once_expert_known(self):
        state = new_game(SHIFT4, 9)
        state.stage_action(1, Message(Q, 1, 0, 1))  # 0's expert reveals itself
        state.resolve_round()
        memory = AgentGameMemory({(Q, 1)})  # expert already requested: no forced move
        trust = make_trust(0, {1: 0.5, 2: 0.5, 3: 0.5})
        weights = candidate_weights(memory, trust, state.player_view(0), Personality(1, 5, 1))
        q_weights = {m.receiver: w for m, w in weights if m.type is Q}
        assert q_weights[2] == pytest.approx(ALPHA_DAMPING * 0.5)
        assert q_weights[3] == pytest.approx(ALPHA_DAMPING * 0.5)


class TestChooseAction:
    def test_forced_request_to_known_expert(self):
        state = new_game(SHIFT4, 9)
        state.stage_action(0, Message(Q, 0, 2, 1))
        state.stage_action(1, Message(Q, 1, 2, 1))  # 0's expert reveals itself to 2
        state.resolve_round()
        state.stage_action(2, Message(R, 2, 0, 2, payload=1))
        state.resolve_round()
        # player 0 learned its expert via the referral and never asked it
        memory = AgentGameMemory({(Q, 2), (Q, 3)})
        trust = make_trust(0, {1: 0.9, 2: 0.9, 3: 0.9})
        rng = np.random.default_rng(0)
        for _ in range(200):
            action = choose_action(memory, trust, state.player_view(0), Personality(1, 5, 1), rng)
            assert action == Message(Q, 0, 1, state.round)

    def test_forced_move_skipped_once_requested(self):
        state = new_game(SHIFT4, 9)
        state.stage_action(1, Message(Q, 1, 0, 1))
        state.resolve_round()
        memory = AgentGameMemory({(Q, 1)})
        trust = make_trust(0, {1: 0.5, 2: 0.5, 3: 0.5})
        action = choose_action(memory, trust, state.player_view(0), Personality(1, 5, 1), np.random.default_rng(1))
        assert not (action.type is Q and action.receiver == 1)

    def test_abstains_when_exhausted(self):
        state = new_game(SHIFT4, 9)
        memory = AgentGameMemory({(Q, 1), (Q, 2), (Q, 3)})
        trust = make_trust(0, {1: 0.5, 2: 0.5, 3: 0.5})
        action = choose_action(memory, trust, state.player_view(0), Personality(1, 5, 1), np.random.default_rng(2))
        assert action is None

    def test_abstains_on_zero_total_weight(self):
        state = new_game(SHIFT4, 9)
        memory = AgentGameMemory()
        trust = make_trust(0, {1: 0.0, 2: 0.0, 3: 0.0})
        action = choose_action(memory, trust, state.player_view(0), Personality(1, 5, 1), np.random.default_rng(3))
        assert action is None

    def test_sampling_matches_weights(self):
        state = new_game(SHIFT4, 9)
        state.stage_action(2, Message(Q, 2, 0, 1))
        state.resolve_round()
        memory = AgentGameMemory({(Q, 2), (Q, 3)})
        trust = make_trust(0, {1: 0.4, 2: 0.2, 3: 0.9})
        rng = np.random.default_rng(4)
        draws = 30_000
        hits = 0
        for _ in range(draws):
            action = choose_action(memory, trust, state.player_view(0), Personality(1, 5, 1), rng)
            if action.type is Q:
                hits += 1
        p = 0.4 / (0.4 + 0.2)
        sigma = (draws * p * (1 - p)) ** 0.5
        assert abs(hits - draws * p) < 4 * sigma

    def test_scale_invariance_of_preferences(self):
        state = new_game(SHIFT4, 9)
        state.stage_action(2, Message(Q, 2, 0, 1))
        state.stage_action(1, Message(Q, 1, 0, 1))
        state.resolve_round()
        memory = AgentGameMemory({(Q, 1)})
        trust = make_trust(0, {1: 0.35, 2: 0.6, 3: 0.8})
        view = state.player_view(0)
        draws = 100_000

        def empirical(personality, seed):
            rng = np.random.default_rng(seed)
            counts: dict = {}
            for _ in range(draws):
                action = choose_action(memory, trust, view, personality, rng)
                key = (action.type, action.receiver)
                counts[key] = counts.get(key, 0) + 1
            return counts

        base = empirical(Personality(1, 5, 1), 99)
        scaled = empirical(Personality(17, 85, 17), 100)
        assert set(base) == set(scaled)
        for key in base:
            p = base[key] / draws
            sigma = max((p * (1 - p) / draws) ** 0.5, 1e-9)
            assert abs(scaled[key] / draws - p) < 5 * sigma, key


def test_agent_plays_only_legal_unrepeated_messages():
    """Full games: actions legal, never repeated per (type, receiver), never to self."""
    rng = np.random.default_rng(77)
    for _ in range(120):
        n = int(rng.integers(3, 7))
        assignment = sample_assignment(n, rng)
        state = new_game(assignment, int(rng.integers(4, 12)))
        agents = [BayesianAgent(i, n, Personality(1, 5, 1)) for i in range(n)]
        seen: list[set] = [set() for _ in range(n)]
        while not state.finished:
            for agent in agents:
                legal = state.legal_messages(agent.player)
                action = agent.act(state.player_view(agent.player), rng)
                if action is None:
                    continue
                assert action in legal
                key = (action.type, action.receiver)
                assert key not in seen[agent.player]
                seen[agent.player].add(key)
                assert action.receiver != agent.player
                state.stage_action(agent.player, action)
            state.resolve_round()


def test_forced_move_priority_over_sampling():
    """Whenever the expert is known and unasked, the request happens immediately."""
    rng = np.random.default_rng(888)
    for _ in range(300):
        n = int(rng.integers(3, 6))
        assignment = sample_assignment(n, rng)
        state = new_game(assignment, int(rng.integers(4, 10)))
        agents = [BayesianAgent(i, n, Personality(1, 5, 1)) for i in range(n)]
        while not state.finished:
            for agent in agents:
                view = state.player_view(agent.player)
                must_request = view.expert is not None and (Q, view.expert) not in agent.memory.sent
                action = agent.act(view, rng)
                if must_request:
                    assert action == Message(Q, agent.player, view.expert, state.round)
                state.stage_action(agent.player, action)
            state.resolve_round()
