#!/usr/bin/env python3
"""Network structure of the communication: matrices, reciprocity, curves.

Writes the adjacency heatmaps, the between-game correlation matrix and the
per-round behavior curves for a replicated run of the reference
configuration into demos/out/.
"""

from pathlib import Path

import numpy as np

from expertgame import SeriesConfig, run_replicas
from expertgame.analysis import (
    adjacency,
    consecutive_game_correlations,
    degree_preserving_shuffle,
    game_correlations,
    knowledge_curves,
    per_round_rates,
    reciprocity,
)

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

config = SeriesConfig(n_players=8, n_games=4, round_mean=10, round_jitter=2,
                      master_seed=7, n_replicas=200)
logs = run_replicas(config, n_jobs=2)
games = [g for s in logs for g in s.games]

one = logs[0].games
print("one series: between-game flow correlations")
print(np.array_str(game_correlations([adjacency([g]) for g in one]), precision=2))

rng = np.random.default_rng(0)
rec = [reciprocity(adjacency(s.games)) for s in logs]
null = [reciprocity(degree_preserving_shuffle(adjacency(s.games), rng)) for s in logs[:50]]
print(f"\nreciprocity of aggregated flows: {np.nanmean(rec):.3f} "
      f"(degree-preserving null: {np.nanmean(null):.3f})")
consecutive = [c for s in logs for c in consecutive_game_correlations(s.games)]
print(f"mean correlation between consecutive games: {np.nanmean(consecutive):.3f}")

rates = per_round_rates(games)
knowledge = knowledge_curves(games)
print("\nper-round averages (requests / positive / negative, knowledge overall / relevant):")
for r in range(min(8, rates.mean.shape[0])):
    print(f"  round {r + 1}: {rates.q[r]:.2f} / {rates.positive[r]:.2f} / {rates.negative[r]:.2f}"
          f"   knowledge {knowledge.overall[r + 1]:.2f} / {knowledge.relevant[r + 1]:.2f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib unavailable; skipping figures")
    raise SystemExit(0)

fig, axes = plt.subplots(1, 5, figsize=(16, 3))
axes[0].imshow(adjacency(games), cmap="viridis")
axes[0].set_title("all games")
for g in range(4):
    m = adjacency([s.games[g] for s in logs])
    axes[g + 1].imshow(m, cmap="viridis")
    axes[g + 1].set_title(f"game {g + 1}")
for ax in axes:
    ax.set_xlabel("receiver")
    ax.set_ylabel("sender")
fig.tight_layout()
fig.savefig(OUT / "adjacency.png", dpi=130)

fig, axes = plt.subplots(1, 2, figsize=(10, 3.6))
rounds = np.arange(1, rates.mean.shape[0] + 1)
axes[0].plot(rounds, rates.q, "o-", label="requests")
axes[0].plot(rounds, rates.positive, "s-", label="positive replies")
axes[0].plot(rounds, rates.negative, "^-", label="negations")
axes[0].set_xlabel("round"), axes[0].set_ylabel("messages per person"), axes[0].legend()
axes[1].plot(knowledge.overall, label="overall knowledge")
axes[1].plot(knowledge.relevant, label="knows own expert")
axes[1].set_xlabel("round"), axes[1].set_ylabel("fraction"), axes[1].legend()
fig.tight_layout()
fig.savefig(OUT / "curves.png", dpi=130)
print(f"\nfigures written to {OUT}/")
