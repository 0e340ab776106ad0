#!/usr/bin/env python3
"""How an agent's trust in a partner evolves from reply waiting times.

Responsiveness is the per-round probability of getting a reply, tracked on
the 21-point grid 0.00, 0.05, ..., 1.00. Replies arriving after k rounds
weight the grid by (1-theta)^(k-1)*theta; a game that ends k rounds after
an unanswered request weights it by (1-theta)^k.
"""

import numpy as np

from expertgame import Observation, mean_responsiveness, update_posterior
from expertgame.trust import HYPOTHESES, uniform_prior

def show(label, dist):
    mean = mean_responsiveness(dist)
    top = HYPOTHESES[np.argmax(dist)]
    bar = "".join("#" if p > 0.1 else "+" if p > 0.02 else "." for p in dist)
    print(f"{label:>28}: mean={mean:.3f} mode={top:.2f}  [{bar}]")

dist = uniform_prior()
show("uniform prior", dist)

print("\na partner that answers quickly:")
for k in (1, 2, 1):
    dist = update_posterior(dist, Observation(partner=1, k=k, replied=True))
    show(f"reply after {k} round(s)", dist)

print("\nthen three games of silence (censored at game end):")
for k in (6, 9, 7):
    dist = update_posterior(dist, Observation(partner=1, k=k, replied=False))
    show(f"no reply, {k} rounds left", dist)

print("\nevidence accumulates across games; the posterior is next game's prior.")
print("a hundred silent rounds pin the estimate to zero:")
dist = update_posterior(uniform_prior(), Observation(1, 100, False))
show("uniform + 100 silent rounds", dist)
