#!/usr/bin/env python3
"""Sweep the rounds-per-game knob and compare against the reply-table targets.

The number of rounds per game is a free parameter of the setup. This sweep
shows how the reply lags and rates move with the horizon and why the
default is round_mean=10: it is the point where all five statistics sit
inside their tolerance bands simultaneously.
"""

from expertgame import SeriesConfig, reply_stats, run_replicas

TARGETS = {
    "lag_N": (2.64, 0.35),
    "lag_Y": (2.73, 0.35),
    "rate_N": (0.25, 0.10),
    "rate_Y": (0.46, 0.10),
    "noreply_known": (0.65, 0.10),
}

print(f"{'mean':>5} {'lag_N':>7} {'lag_Y':>7} {'rate_N':>7} {'rate_Y':>7} {'norep':>7}  inside all bands?")
for round_mean in range(10, 21, 2):
    config = SeriesConfig(n_players=8, n_games=4, round_mean=round_mean, round_jitter=2,
                          master_seed=31, n_replicas=120)
    games = [g for s in run_replicas(config, n_jobs=2) for g in s.games]
    stats = reply_stats(games)
    values = {
        "lag_N": stats.lag_negative,
        "lag_Y": stats.lag_positive,
        "rate_N": stats.rate_negative,
        "rate_Y": stats.rate_positive,
        "noreply_known": stats.rate_known_given_noreply,
    }
    ok = all(abs(values[k] - c) <= t for k, (c, t) in TARGETS.items())
    print(f"{round_mean:>5} {values['lag_N']:>7.2f} {values['lag_Y']:>7.2f} "
          f"{values['rate_N']:>7.2f} {values['rate_Y']:>7.2f} {values['noreply_known']:>7.2f}"
          f"  {'yes' if ok else 'no'}")

print("\ntargets:", ", ".join(f"{k}={c}+-{t}" for k, (c, t) in TARGETS.items()))
