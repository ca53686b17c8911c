"""Arm-selection policies over posterior banks.

Two index rules are provided, each in a cooperative variant (posteriors
are pooled with the neighbours after every round) and with baselines:

* Thompson sampling: draw one sample of each arm's mean from the
  posterior and play the argmax.
* Quantile index ("Bayes-UCB"): play the arm whose posterior quantile
  at level 1 - 1/(t * log(T)^c) is largest.

The policy ``kind`` also fixes how the network behaves:

* ``dec_thompson`` / ``dec_bayes_ucb``  pool after every round, with a
  likelihood power ``eta`` that defaults to the number of agents;
* ``isolated_thompson``                 never communicates, eta = 1;
* ``centralized_thompson``              all observations go to one
  shared posterior each round (an all-to-all exchange), eta = 1.

Ties in the index are broken toward the lowest arm number, so runs are
deterministic given the streams.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import math

import numpy as np

POLICY_KINDS = (
    "dec_thompson",
    "dec_bayes_ucb",
    "isolated_thompson",
    "centralized_thompson",
)

# how each policy kind moves information between the agents
MERGE = "merge"
NO_MERGE = "no_merge"
SHARED = "shared"

_QUANTILE_FLOOR = 1e-12

__all__ = [
    "POLICY_KINDS",
    "MERGE",
    "NO_MERGE",
    "SHARED",
    "PolicyConfig",
    "quantile_level",
    "select_thompson",
    "select_bayes_ucb",
    "argmax_rows",
]


@dataclass(frozen=True)
class PolicyConfig:
    """Which index rule to run and with what parameters.

    ``eta`` is the likelihood power of the tempered update; ``None``
    picks the kind's default (the number of agents for the
    cooperative kinds, 1 otherwise).  ``horizon`` is only needed by
    the quantile rule, whose level depends on log(T); ``quantile_c``
    is the exponent c on that log factor.
    """

    kind: str
    eta: float | None = None
    quantile_c: float = 0.0
    horizon: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in POLICY_KINDS:
            raise ValueError(
                f"unknown policy kind {self.kind!r}; expected one of {POLICY_KINDS}"
            )
        if self.eta is not None and not self.eta > 0.0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if self.kind == "dec_bayes_ucb":
            if self.horizon is None or self.horizon < 2:
                raise ValueError(
                    "the quantile policy needs a horizon >= 2 to set its levels"
                )

    @property
    def communication(self) -> str:
        if self.kind in ("dec_thompson", "dec_bayes_ucb"):
            return MERGE
        if self.kind == "isolated_thompson":
            return NO_MERGE
        return SHARED

    @property
    def uses_quantiles(self) -> bool:
        return self.kind == "dec_bayes_ucb"

    def resolved_eta(self, n_agents: int) -> float:
        if self.eta is not None:
            return float(self.eta)
        if self.communication == MERGE:
            return float(n_agents)
        return 1.0


def quantile_level(t: int, horizon: int, c: float = 0.0) -> float:
    """Level 1 - 1/(t * log(horizon)^c), clamped inside (0, 1).

    ``t`` is the 1-based round number.  The clamp keeps the level
    usable by the quantile functions in the first round (where the
    raw formula gives 0 for c = 0) and for extremely long runs.
    """
    if t < 1:
        raise ValueError(f"round number must be >= 1, got {t}")
    if horizon < 2:
        raise ValueError(f"horizon must be >= 2, got {horizon}")
    level = 1.0 - 1.0 / (t * math.log(horizon) ** c)
    return min(max(level, _QUANTILE_FLOOR), 1.0 - _QUANTILE_FLOOR)


def argmax_rows(values: np.ndarray) -> np.ndarray:
    """Row-wise argmax with ties going to the lowest index."""
    return np.argmax(values, axis=1)


def select_thompson(bank, stream: np.random.Generator) -> np.ndarray:
    """Thompson choice for every agent in the bank at once.

    Samples the full (agents, arms) matrix from ``stream`` in one call
    (row-major order), so the draw sequence is a deterministic function
    of the stream state alone.
    """
    return argmax_rows(bank.thompson_sample(stream))


def select_bayes_ucb(bank, t: int, horizon: int, c: float = 0.0) -> np.ndarray:
    """Quantile-index choice for every agent in the bank at once."""
    level = quantile_level(t, horizon, c)
    return argmax_rows(bank.quantile_matrix(level))
