"""Conjugate posteriors with tempered updates and log-linear pooling.

Two layers live here.  The scalar classes (:class:`BetaPosterior`,
:class:`GaussianPosterior`) define the per-arm operations: updating on
one observation with the likelihood raised to a power ``eta``, and
merging several agents' posteriors by the weighted geometric mean of
their densities.  Both operations stay in closed form for these
families:

* Beta(alpha, beta) after a 0/1 reward y with power eta becomes
  Beta(alpha + eta * y, beta + eta * (1 - y)); pooling with weights w_j
  averages the parameters: alpha = sum_j w_j alpha_j.
* Normal(mean, 1/precision) with known noise variance s^2 becomes, on
  reward y, precision' = precision + eta / s^2 and mean' the
  precision-weighted average; pooling averages precision and
  precision * mean.

The bank classes vectorize the same arithmetic over an (agents, arms)
parameter matrix so a whole network round is a couple of numpy ops.
``beta_params_from_history`` reconstructs the Beta bank of any round
directly from the play/reward history and powers of the weight matrix,
which the tests use as an independent oracle for the iterative loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .specfun import gaussian_quantile, inv_reg_inc_beta

__all__ = [
    "BetaPosterior",
    "GaussianPosterior",
    "merge_beta",
    "merge_gaussian",
    "BetaBank",
    "GaussianBank",
    "beta_params_from_history",
    "beta_posterior_from_history",
]


def _check_weights(weights: Sequence[float], count: int) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (count,):
        raise ValueError(
            f"expected {count} pooling weights, got shape {w.shape}"
        )
    if np.any(w < 0.0):
        raise ValueError("pooling weights must be non-negative")
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValueError(
            f"pooling weights must sum to 1 within 1e-12, got sum {w.sum()!r}"
        )
    return w


@dataclass
class BetaPosterior:
    """Beta(alpha, beta) belief about one Bernoulli arm."""

    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if not (self.alpha > 0.0 and self.beta > 0.0):
            raise ValueError(
                f"Beta parameters must be positive, got ({self.alpha}, {self.beta})"
            )

    def tempered_update(self, reward: float, eta: float) -> "BetaPosterior":
        """Posterior after observing ``reward`` with likelihood power ``eta``."""
        if not eta > 0.0:
            raise ValueError(f"eta must be positive, got {eta}")
        y = float(reward)
        if y not in (0.0, 1.0):
            raise ValueError(f"bernoulli reward must be 0 or 1, got {reward}")
        return BetaPosterior(self.alpha + eta * y, self.beta + eta * (1.0 - y))

    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    def sample(self, stream: np.random.Generator) -> float:
        return float(stream.beta(self.alpha, self.beta))

    def quantile(self, level: float) -> float:
        return inv_reg_inc_beta(self.alpha, self.beta, level)


@dataclass
class GaussianPosterior:
    """Normal(mean, 1/precision) belief about one Gaussian arm."""

    mean: float = 0.0
    precision: float = 1.0

    def __post_init__(self) -> None:
        if not self.precision > 0.0:
            raise ValueError(
                f"precision must be positive, got {self.precision}"
            )

    def tempered_update(
        self, reward: float, eta: float, noise_sd: float = 1.0
    ) -> "GaussianPosterior":
        """Posterior after observing ``reward`` with likelihood power ``eta``."""
        if not eta > 0.0:
            raise ValueError(f"eta must be positive, got {eta}")
        if not noise_sd > 0.0:
            raise ValueError(f"noise_sd must be positive, got {noise_sd}")
        obs_prec = eta / (noise_sd * noise_sd)
        new_prec = self.precision + obs_prec
        new_mean = (self.precision * self.mean + obs_prec * float(reward)) / new_prec
        return GaussianPosterior(new_mean, new_prec)

    def sample(self, stream: np.random.Generator) -> float:
        return float(stream.normal(self.mean, 1.0 / np.sqrt(self.precision)))

    def quantile(self, level: float) -> float:
        return gaussian_quantile(self.mean, 1.0 / np.sqrt(self.precision), level)


def merge_beta(
    posteriors: Sequence[BetaPosterior], weights: Sequence[float]
) -> BetaPosterior:
    """Log-linear pool of Beta posteriors: parameters are w-averaged."""
    w = _check_weights(weights, len(posteriors))
    alpha = float(np.dot(w, [p.alpha for p in posteriors]))
    beta = float(np.dot(w, [p.beta for p in posteriors]))
    return BetaPosterior(alpha, beta)


def merge_gaussian(
    posteriors: Sequence[GaussianPosterior], weights: Sequence[float]
) -> GaussianPosterior:
    """Log-linear pool of Gaussians: precision and precision * mean
    are w-averaged."""
    w = _check_weights(weights, len(posteriors))
    prec = float(np.dot(w, [p.precision for p in posteriors]))
    prec_mean = float(np.dot(w, [p.precision * p.mean for p in posteriors]))
    return GaussianPosterior(prec_mean / prec, prec)


def _check_merge_matrix(W: np.ndarray, n_agents: int) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    if W.shape != (n_agents, n_agents):
        raise ValueError(
            f"weight matrix shape {W.shape} does not match {n_agents} agents"
        )
    return W


class BetaBank:
    """Per-(agent, arm) Beta parameters for a whole network."""

    def __init__(self, n_agents: int, n_arms: int, prior: tuple[float, float] = (1.0, 1.0)):
        a0, b0 = float(prior[0]), float(prior[1])
        if not (a0 > 0.0 and b0 > 0.0):
            raise ValueError(f"prior parameters must be positive, got {prior}")
        self.alpha = np.full((n_agents, n_arms), a0)
        self.beta = np.full((n_agents, n_arms), b0)

    @property
    def n_agents(self) -> int:
        return self.alpha.shape[0]

    @property
    def n_arms(self) -> int:
        return self.alpha.shape[1]

    def update(self, arms: np.ndarray, rewards: np.ndarray, eta: float) -> None:
        """Tempered update of every agent's played arm, in place."""
        idx = np.arange(self.n_agents)
        self.alpha[idx, arms] += eta * rewards
        self.beta[idx, arms] += eta * (1.0 - rewards)

    def merge(self, W: np.ndarray) -> None:
        """Log-linear pool along the rows of ``W``, in place."""
        W = _check_merge_matrix(W, self.n_agents)
        self.alpha = W @ self.alpha
        self.beta = W @ self.beta

    def thompson_sample(self, stream: np.random.Generator) -> np.ndarray:
        """One posterior-mean sample per (agent, arm)."""
        return stream.beta(self.alpha, self.beta)

    def quantile_matrix(self, level: float) -> np.ndarray:
        out = np.empty_like(self.alpha)
        for i in range(self.n_agents):
            for k in range(self.n_arms):
                out[i, k] = inv_reg_inc_beta(self.alpha[i, k], self.beta[i, k], level)
        return out

    def posterior(self, agent: int, arm: int) -> BetaPosterior:
        return BetaPosterior(float(self.alpha[agent, arm]), float(self.beta[agent, arm]))


class GaussianBank:
    """Per-(agent, arm) Gaussian natural parameters for a whole network."""

    def __init__(
        self,
        n_agents: int,
        n_arms: int,
        noise_sd: float = 1.0,
        prior: tuple[float, float] = (0.0, 1.0),
    ):
        prior_mean, prior_sd = float(prior[0]), float(prior[1])
        if not prior_sd > 0.0:
            raise ValueError(f"prior sd must be positive, got {prior_sd}")
        if not noise_sd > 0.0:
            raise ValueError(f"noise_sd must be positive, got {noise_sd}")
        prec0 = 1.0 / (prior_sd * prior_sd)
        self.precision = np.full((n_agents, n_arms), prec0)
        self.prec_mean = np.full((n_agents, n_arms), prec0 * prior_mean)
        self.noise_sd = noise_sd

    @property
    def n_agents(self) -> int:
        return self.precision.shape[0]

    @property
    def n_arms(self) -> int:
        return self.precision.shape[1]

    @property
    def mean(self) -> np.ndarray:
        return self.prec_mean / self.precision

    def update(self, arms: np.ndarray, rewards: np.ndarray, eta: float) -> None:
        """Tempered update of every agent's played arm, in place."""
        obs_prec = eta / (self.noise_sd * self.noise_sd)
        idx = np.arange(self.n_agents)
        self.precision[idx, arms] += obs_prec
        self.prec_mean[idx, arms] += obs_prec * rewards

    def merge(self, W: np.ndarray) -> None:
        """Log-linear pool along the rows of ``W``, in place."""
        W = _check_merge_matrix(W, self.n_agents)
        self.precision = W @ self.precision
        self.prec_mean = W @ self.prec_mean

    def thompson_sample(self, stream: np.random.Generator) -> np.ndarray:
        """One posterior-mean sample per (agent, arm)."""
        sd = 1.0 / np.sqrt(self.precision)
        return self.mean + sd * stream.standard_normal(self.precision.shape)

    def quantile_matrix(self, level: float) -> np.ndarray:
        from .specfun import std_normal_quantile

        z = std_normal_quantile(level)
        return self.mean + z / np.sqrt(self.precision)

    def posterior(self, agent: int, arm: int) -> GaussianPosterior:
        return GaussianPosterior(
            float(self.mean[agent, arm]), float(self.precision[agent, arm])
        )


def beta_params_from_history(
    arms: np.ndarray,
    rewards: np.ndarray,
    W: np.ndarray,
    eta: float,
    t: int,
    n_arms: int,
    prior: tuple[float, float] = (1.0, 1.0),
) -> tuple[np.ndarray, np.ndarray]:
    """Beta bank at the start of round ``t``, straight from the history.

    ``arms`` and ``rewards`` are (rounds, agents) arrays of the plays
    and payoffs of rounds 1..rounds, and ``W`` is the static weight
    matrix used after every round.  Unrolling the update/merge
    recursion gives each entry in closed form:

        alpha_ik(t) = prior + eta * sum_{tau=1}^{t-1} sum_j
                      (W ** (t - tau))_ij * y_j(tau) * [a_j(tau) = k]

    and symmetrically for beta with 1 - y.  Round t = 1 returns the
    prior.  Only static schedules are supported here; that is the only
    case where the power form holds.
    """
    arms = np.asarray(arms)
    rewards = np.asarray(rewards, dtype=float)
    if arms.ndim != 2 or rewards.shape != arms.shape:
        raise ValueError("arms and rewards must be matching (rounds, agents) arrays")
    n_rounds, n_agents = arms.shape
    if t < 1:
        raise ValueError(f"round index must be >= 1, got {t}")
    if t - 1 > n_rounds:
        raise ValueError(
            f"history holds {n_rounds} rounds, cannot reconstruct round {t}"
        )
    W = _check_merge_matrix(W, n_agents)

    alpha = np.full((n_agents, n_arms), float(prior[0]))
    beta = np.full((n_agents, n_arms), float(prior[1]))
    w_pow = W.copy()  # W ** (t - tau), starting from tau = t - 1
    for tau in range(t - 1, 0, -1):
        a_tau = arms[tau - 1]
        y_tau = rewards[tau - 1]
        for k in range(n_arms):
            played = a_tau == k
            if not np.any(played):
                continue
            alpha[:, k] += eta * (w_pow[:, played] @ y_tau[played])
            beta[:, k] += eta * (w_pow[:, played] @ (1.0 - y_tau[played]))
        w_pow = w_pow @ W
    return alpha, beta


def beta_posterior_from_history(
    arms: np.ndarray,
    rewards: np.ndarray,
    W: np.ndarray,
    eta: float,
    t: int,
    n_arms: int,
    agent: int,
    arm: int,
    prior: tuple[float, float] = (1.0, 1.0),
) -> BetaPosterior:
    """One agent/arm entry of :func:`beta_params_from_history`."""
    alpha, beta = beta_params_from_history(
        arms, rewards, W, eta, t, n_arms, prior=prior
    )
    return BetaPosterior(float(alpha[agent, arm]), float(beta[agent, arm]))
