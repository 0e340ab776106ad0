"""Expert game: rules engine, Bayesian trust agents, simulator and analysis."""

from .agents import AgentGameMemory, BayesianAgent, Personality, candidate_weights, choose_action
from .analysis import (
    MetricsBundle,
    adjacency,
    compute_metrics,
    game_correlations,
    knowledge_curves,
    message_type_fractions,
    per_round_rates,
    reciprocity,
    reply_stats,
)
from .game import (
    Assignment,
    ConfigurationError,
    ExpertGameError,
    GameOverError,
    GameState,
    Message,
    MessageType,
    NotAParticipantError,
    PlayerView,
    RuleViolation,
    new_game,
    sample_assignment,
)
from .logs import GameLog, parse_jsonl, read_jsonl, serialize_games, write_jsonl
from .sim import AgentConfig, SeriesConfig, SeriesLog, run_replicas, run_series
from .trust import (
    HYPOTHESES,
    Observation,
    TrustState,
    end_of_game_update,
    extract_observations,
    likelihood,
    mean_responsiveness,
    update_posterior,
)

__version__ = "0.1.0"
