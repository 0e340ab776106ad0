"""Command line entry points: batch simulation and log analysis.

    expertgame simulate --config run.json --out logs/
    expertgame analyze --logs logs/ --out metrics/ [--type-filter all] [--plots]
    expertgame serve [--host H] [--port P] [--log-dir D]

The simulate config file mirrors the series configuration, e.g.::

    {"n_players": 8, "n_games": 4, "round_mean": 10, "round_jitter": 2,
     "agent": {"alpha": 1.0, "beta": 5.0, "gamma": 1.0},
     "master_seed": 1, "n_replicas": 100}

EXPERTGAME_MASTER_SEED overrides the config's master seed when set.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .analysis import (
    adjacency,
    consecutive_game_correlations,
    game_correlations,
    knowledge_curves,
    message_type_fractions,
    per_round_rates,
    reciprocity,
    reply_stats,
)
from .game import ConfigurationError
from .logs import read_jsonl
from .sim import SeriesConfig, run_replicas, write_series_outputs

SEED_ENV_VAR = "EXPERTGAME_MASTER_SEED"


def _load_config(path: str) -> SeriesConfig:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if SEED_ENV_VAR in os.environ:
        data["master_seed"] = int(os.environ[SEED_ENV_VAR])
    try:
        return SeriesConfig.from_dict(data)
    except TypeError as exc:
        raise ConfigurationError(f"bad config {path}: {exc}") from None


def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    logs = run_replicas(config, n_jobs=args.jobs)
    manifest = write_series_outputs(logs, args.out)
    print(f"wrote {len(manifest['series'])} series logs to {args.out}")
    return 0


def _write_matrix(path: Path, matrix: np.ndarray) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for row in matrix:
            writer.writerow([("" if isinstance(v, float) and math.isnan(v) else v) for v in row])


def _nan_to_none(value: float):
    return None if isinstance(value, float) and math.isnan(value) else value


def cmd_analyze(args) -> int:
    log_dir = Path(args.logs)
    files = sorted(log_dir.glob("*.jsonl"))
    if not files:
        print(f"no .jsonl logs found in {log_dir}", file=sys.stderr)
        return 1
    series = [read_jsonl(f) for f in files]
    all_games = [g for games in series for g in games]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    n_games = max(len(games) for games in series)
    per_index = []  # adjacency of game index g summed over series
    for g in range(n_games):
        per_index.append(adjacency([games[g] for games in series if len(games) > g], args.type_filter))
    aggregate = adjacency(all_games, args.type_filter)
    _write_matrix(out / "aggregate_adjacency.csv", aggregate)
    for g, matrix in enumerate(per_index, start=1):
        _write_matrix(out / f"game_{g}_adjacency.csv", matrix)

    correlations = game_correlations(per_index) if n_games >= 2 else np.ones((1, 1))
    _write_matrix(out / "correlation_matrix.csv", correlations)

    rates = per_round_rates(all_games)
    with open(out / "per_round_rates.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["round", "q", "positive", "negative", "n_games"])
        for r in range(rates.mean.shape[0]):
            writer.writerow([r + 1, *rates.mean[r], rates.n_games_at_round[r]])

    knowledge = knowledge_curves(all_games)
    with open(out / "knowledge_curves.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["round", "overall", "relevant", "n_games"])
        for r in range(len(knowledge.overall)):
            writer.writerow([r, knowledge.overall[r], knowledge.relevant[r], knowledge.n_games_at_round[r]])

    reply = reply_stats(all_games)
    fractions = message_type_fractions(all_games)
    consecutive = [c for games in series for c in consecutive_game_correlations(games, args.type_filter)]
    consecutive = [c for c in consecutive if not math.isnan(c)]
    summary = {
        "n_series": len(series),
        "n_games": len(all_games),
        "type_filter": args.type_filter,
        "message_fractions": {
            "q": _nan_to_none(fractions[0]),
            "positive": _nan_to_none(fractions[1]),
            "negative": _nan_to_none(fractions[2]),
        },
        "reply_table": {
            "lag_negative": _nan_to_none(reply.lag_negative),
            "lag_positive": _nan_to_none(reply.lag_positive),
            "rate_negative": _nan_to_none(reply.rate_negative),
            "rate_positive": _nan_to_none(reply.rate_positive),
            "rate_known_given_noreply": _nan_to_none(reply.rate_known_given_noreply),
            "rate_noreply_given_knowledge": _nan_to_none(reply.rate_noreply_given_knowledge),
            "n_events": reply.n_events,
        },
        "reciprocity_aggregate": _nan_to_none(reciprocity(aggregate)),
        "mean_consecutive_game_correlation": (
            float(np.mean(consecutive)) if consecutive else None
        ),
    }
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")

    if args.plots:
        _render_plots(out, per_index, aggregate, correlations, rates, knowledge)
    print(f"wrote metrics for {len(series)} series ({len(all_games)} games) to {out}")
    return 0


def _render_plots(out: Path, per_index, aggregate, correlations, rates, knowledge) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, len(per_index) + 1, figsize=(3 * (len(per_index) + 1), 3))
    for ax, (title, matrix) in zip(
        np.atleast_1d(axes),
        [("all games", aggregate)] + [(f"game {g + 1}", m) for g, m in enumerate(per_index)],
    ):
        ax.imshow(matrix, cmap="viridis")
        ax.set_title(title)
        ax.set_xlabel("receiver")
        ax.set_ylabel("sender")
    fig.tight_layout()
    fig.savefig(out / "adjacency.png", dpi=120)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(4, 3.5))
    im = ax.imshow(correlations, vmin=-1, vmax=1, cmap="RdBu_r")
    fig.colorbar(im, ax=ax)
    ax.set_title("between-game correlation")
    fig.tight_layout()
    fig.savefig(out / "correlations.png", dpi=120)
    plt.close(fig)

    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    rounds = np.arange(1, rates.mean.shape[0] + 1)
    axes[0].plot(rounds, rates.q, label="requests")
    axes[0].plot(rounds, rates.positive, label="positive")
    axes[0].plot(rounds, rates.negative, label="negative")
    axes[0].set_xlabel("round")
    axes[0].set_ylabel("messages per person")
    axes[0].legend()
    axes[1].plot(np.arange(len(knowledge.overall)), knowledge.overall, label="overall")
    axes[1].plot(np.arange(len(knowledge.relevant)), knowledge.relevant, label="relevant")
    axes[1].set_xlabel("round")
    axes[1].set_ylabel("knowledge fraction")
    axes[1].legend()
    fig.tight_layout()
    fig.savefig(out / "curves.png", dpi=120)
    plt.close(fig)


def cmd_serve(args) -> int:
    from .service import main as serve_main

    serve_main(["--host", args.host, "--port", str(args.port), "--log-dir", args.log_dir])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="expertgame", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="run seeded series replicas, write JSONL logs")
    simulate.add_argument("--config", required=True, help="JSON series configuration file")
    simulate.add_argument("--out", required=True, help="output directory")
    simulate.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    simulate.set_defaults(func=cmd_simulate)

    analyze = sub.add_parser("analyze", help="compute matrices, curves and the reply table")
    analyze.add_argument("--logs", required=True, help="directory of .jsonl logs")
    analyze.add_argument("--out", required=True, help="output directory")
    analyze.add_argument("--type-filter", choices=["q", "replies", "all"], default="all")
    analyze.add_argument("--plots", action="store_true", help="also write PNG figures")
    analyze.set_defaults(func=cmd_analyze)

    serve = sub.add_parser("serve", help="host live games over HTTP/WebSocket")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--log-dir", default="service_logs")
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
