#!/usr/bin/env python3
"""Tempered updates and posterior pooling, step by step.

Two agents watch the same Bernoulli arm but only one of them plays it.
After each round they average their posterior parameters over a
doubly stochastic matrix, so the idle agent's belief is pulled toward
the active agent's evidence.  With likelihood power eta = 2 (the
number of agents) the pooled posterior concentrates at the same rate
as if both agents had played.
"""

import numpy as np

from decbandits.posterior import BetaBank, BetaPosterior, merge_beta


def two_agent_walkthrough():
    rng = np.random.default_rng(0)
    true_mean = 0.7
    eta = 2.0
    W = np.full((2, 2), 0.5)

    bank = BetaBank(n_agents=2, n_arms=1)
    print("round  agent0 (alpha, beta)   agent1 (alpha, beta)   means")
    for t in range(1, 11):
        reward = float(rng.random() < true_mean)
        # only agent 0 plays; agent 1 free-rides on the merge
        bank.alpha[0, 0] += eta * reward
        bank.beta[0, 0] += eta * (1.0 - reward)
        bank.merge(W)
        a0, b0 = bank.alpha[0, 0], bank.beta[0, 0]
        a1, b1 = bank.alpha[1, 0], bank.beta[1, 0]
        m = bank.alpha / (bank.alpha + bank.beta)
        print(
            f"{t:5d}  ({a0:6.2f}, {b0:6.2f})      ({a1:6.2f}, {b1:6.2f})"
            f"      {m[0, 0]:.3f} / {m[1, 0]:.3f}"
        )
    print(f"\ntrue mean {true_mean}; both agents end with the same belief\n")


def scalar_merge_matches_bank():
    # the single-posterior helpers agree with the vectorized bank
    posteriors = [BetaPosterior(3.0, 1.0), BetaPosterior(1.0, 4.0)]
    weights = np.array([0.25, 0.75])
    merged = merge_beta(posteriors, weights)
    print("weighted pool of Beta(3,1) and Beta(1,4) at (0.25, 0.75):")
    print(f"  Beta({merged.alpha}, {merged.beta}), mean {merged.mean():.4f}")


if __name__ == "__main__":
    two_agent_walkthrough()
    scalar_merge_matches_bank()
