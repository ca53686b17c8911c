"""Bandit instances and reproducible reward streams.

A :class:`BanditInstance` is a frozen description of the arm
distributions.  Randomness is organized around a single master seed:
every (run, agent) pair gets its own ``numpy`` generator derived
through ``SeedSequence`` spawn keys, so simulations are reproducible
bit for bit regardless of execution order, and adding agents or runs
never perturbs the streams of existing ones.

Stream layout for a scenario with N agents (all derived from the
master seed and the run index):

* slots ``0 .. N-1``  reward noise, one stream per agent,
* slot ``N``          arm-selection randomness shared by the policy,
* slot ``N + 1``      network schedule randomness (gossip pairs,
                      link failures).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BERNOULLI = "bernoulli"
GAUSSIAN = "gaussian"
FAMILIES = (BERNOULLI, GAUSSIAN)

__all__ = [
    "BERNOULLI",
    "GAUSSIAN",
    "FAMILIES",
    "BanditInstance",
    "suboptimality_gaps",
    "child_seed_sequence",
    "reward_stream",
    "policy_stream",
    "schedule_seed",
    "draw_reward",
    "presample_rewards",
]


@dataclass(frozen=True)
class BanditInstance:
    """Arm distributions for one bandit problem.

    ``means`` holds the expected reward of each arm.  For the
    ``bernoulli`` family the means must lie in [0, 1] and rewards are
    0/1 coin flips; for the ``gaussian`` family rewards are
    ``Normal(mean, noise_sd**2)`` with a common known ``noise_sd``.
    """

    family: str
    means: tuple[float, ...]
    noise_sd: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(
                f"unknown family {self.family!r}; expected one of {FAMILIES}"
            )
        means = tuple(float(m) for m in self.means)
        object.__setattr__(self, "means", means)
        if len(means) < 1:
            raise ValueError("a bandit instance needs at least one arm")
        if self.family == BERNOULLI:
            for m in means:
                if not 0.0 <= m <= 1.0:
                    raise ValueError(
                        f"bernoulli means must lie in [0, 1], got {m}"
                    )
        if not self.noise_sd > 0.0:
            raise ValueError(f"noise_sd must be positive, got {self.noise_sd}")

    @property
    def n_arms(self) -> int:
        return len(self.means)

    @property
    def best_mean(self) -> float:
        return max(self.means)

    @property
    def best_arm(self) -> int:
        return int(np.argmax(self.means))


def suboptimality_gaps(instance: BanditInstance) -> np.ndarray:
    """Per-arm gaps ``max(means) - means[k]`` as a float array."""
    means = np.asarray(instance.means, dtype=float)
    return instance.best_mean - means


def _check_master_seed(master_seed: int) -> int:
    seed = int(master_seed)
    if seed < 0:
        raise ValueError(f"master seed must be non-negative, got {seed}")
    return seed


def child_seed_sequence(master_seed: int, run: int, slot: int) -> np.random.SeedSequence:
    """Deterministic child sequence for one (run, slot) pair."""
    return np.random.SeedSequence(
        entropy=_check_master_seed(master_seed), spawn_key=(int(run), int(slot))
    )


def reward_stream(master_seed: int, run: int, agent: int) -> np.random.Generator:
    """Reward-noise generator for one agent in one run."""
    if agent < 0:
        raise ValueError(f"agent index must be non-negative, got {agent}")
    return np.random.default_rng(child_seed_sequence(master_seed, run, agent))


def policy_stream(master_seed: int, run: int, n_agents: int) -> np.random.Generator:
    """Arm-selection generator shared by all agents in one run."""
    return np.random.default_rng(child_seed_sequence(master_seed, run, n_agents))


def schedule_seed(master_seed: int, run: int, n_agents: int) -> int:
    """Integer seed for the network schedule of one run."""
    seq = child_seed_sequence(master_seed, run, n_agents + 1)
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def draw_reward(
    instance: BanditInstance, arm: int, stream: np.random.Generator
) -> float:
    """Draw one reward for ``arm`` from the given stream."""
    if not 0 <= arm < instance.n_arms:
        raise IndexError(
            f"arm {arm} out of range for {instance.n_arms}-arm instance"
        )
    if instance.family == BERNOULLI:
        return float(stream.random() < instance.means[arm])
    return float(stream.normal(instance.means[arm], instance.noise_sd))


def presample_rewards(
    instance: BanditInstance, stream: np.random.Generator, horizon: int
) -> np.ndarray:
    """Pre-draw a (horizon, n_arms) table of rewards for one agent.

    Row t holds the reward each arm would pay this agent in round
    t + 1.  Consuming column ``arm`` of row ``t`` is distributionally
    identical to calling :func:`draw_reward` in sequence, and lets the
    simulation loop avoid per-round generator calls.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    k = instance.n_arms
    if instance.family == BERNOULLI:
        u = stream.random((horizon, k))
        return (u < np.asarray(instance.means)).astype(float)
    noise = stream.normal(0.0, instance.noise_sd, size=(horizon, k))
    return noise + np.asarray(instance.means)
