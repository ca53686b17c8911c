"""Theoretical regret quantities and empirical curve diagnostics.

For Bernoulli instances run with the cooperative Thompson policy at
likelihood power eta = N, the cumulative network-averaged regret admits
an upper bound made of two computable pieces plus one remainder with no
explicit constant:

* a Lai-Robbins-type term
  sum_k gap_k * (1+eps)^2 * log(N*T) / (N * d(mu_k, mu_best)),
  where d is the Bernoulli KL divergence — note the N in both the log
  and the denominator: the network shares the exploration cost;
* a network term 3 * (1 + 8/eps) * log(N)/(1 - lambda2) * sum_k gap_k
  paid for imperfect mixing, where lambda2 is the modulus of the
  second-largest eigenvalue of the weight matrix;
* an unquantified O(1/eps^n_tilde) remainder with
  n_tilde = N*log(N)/(1 - lambda2), reported by name and never
  silently added to the total.

The bound divided by log T converges to sum_k gap_k / (N * d(mu_k,
mu_best)) (:func:`asymptotic_slope`), which the slope-fitting helpers
compare against simulated curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .environment import BERNOULLI, BanditInstance, suboptimality_gaps
from .specfun import bernoulli_kl

__all__ = [
    "BoundInputs",
    "RegretBound",
    "regret_upper_bound",
    "bound_curve",
    "asymptotic_slope",
    "fit_log_slope",
    "log_fit_r2",
]


@dataclass(frozen=True)
class BoundInputs:
    """Inputs of the regret upper bound."""

    instance: BanditInstance
    n_agents: int
    lambda2: float
    epsilon: float
    horizon: int

    def __post_init__(self) -> None:
        if self.instance.family != BERNOULLI:
            raise ValueError(
                "the regret bound is stated for bernoulli instances, "
                f"got family {self.instance.family!r}"
            )
        if self.n_agents < 1:
            raise ValueError(f"n_agents must be >= 1, got {self.n_agents}")
        if not 0.0 <= self.lambda2 < 1.0:
            raise ValueError(f"lambda2 must lie in [0, 1), got {self.lambda2}")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")


@dataclass(frozen=True)
class RegretBound:
    """Evaluated bound, split into its computable terms.

    ``total`` is kl_term + network_term; the remainder exponent
    ``n_tilde`` names the O(1/eps^n_tilde) term that has no explicit
    constant and is therefore excluded from ``total``.
    """

    kl_term: float
    network_term: float
    n_tilde: float

    @property
    def total(self) -> float:
        return self.kl_term + self.network_term


def _kl_weights(instance: BanditInstance) -> tuple[np.ndarray, np.ndarray]:
    """(gaps, gap/d ratios) over the suboptimal arms; infinite-KL arms
    contribute zero to the ratio sum."""
    gaps = suboptimality_gaps(instance)
    best = instance.best_mean
    ratios = np.zeros_like(gaps)
    for k, (gap, mean) in enumerate(zip(gaps, instance.means)):
        if gap <= 0.0:
            continue
        d = bernoulli_kl(mean, best)
        if math.isinf(d):
            continue
        ratios[k] = gap / d
    return gaps, ratios


def regret_upper_bound(inputs: BoundInputs) -> RegretBound:
    """Evaluate the two computable bound terms at the given horizon."""
    n = inputs.n_agents
    gaps, ratios = _kl_weights(inputs.instance)
    log_nt = math.log(n * inputs.horizon)
    kl_term = float(ratios.sum()) * (1.0 + inputs.epsilon) ** 2 * log_nt / n
    mixing = math.log(n) / (1.0 - inputs.lambda2)
    network_term = 3.0 * (1.0 + 8.0 / inputs.epsilon) * mixing * float(gaps.sum())
    n_tilde = n * mixing
    return RegretBound(kl_term=kl_term, network_term=network_term, n_tilde=n_tilde)


def bound_curve(inputs: BoundInputs) -> np.ndarray:
    """Bound totals over t = 1..horizon (only the KL term grows)."""
    n = inputs.n_agents
    gaps, ratios = _kl_weights(inputs.instance)
    t = np.arange(1, inputs.horizon + 1, dtype=float)
    kl = float(ratios.sum()) * (1.0 + inputs.epsilon) ** 2 * np.log(n * t) / n
    mixing = math.log(n) / (1.0 - inputs.lambda2)
    network = 3.0 * (1.0 + 8.0 / inputs.epsilon) * mixing * float(gaps.sum())
    return kl + network


def asymptotic_slope(instance: BanditInstance, n_agents: int) -> float:
    """Limit of (regret bound) / log T: sum_k gap_k / (N d(mu_k, mu_best))."""
    if instance.family != BERNOULLI:
        raise ValueError(
            f"the asymptotic slope is stated for bernoulli instances, "
            f"got family {instance.family!r}"
        )
    if n_agents < 1:
        raise ValueError(f"n_agents must be >= 1, got {n_agents}")
    _, ratios = _kl_weights(instance)
    return float(ratios.sum()) / n_agents


def _window_points(
    values: np.ndarray, window: tuple[int, int], rounds: np.ndarray | None
) -> tuple[np.ndarray, np.ndarray]:
    values = np.asarray(values, dtype=float)
    t_lo, t_hi = int(window[0]), int(window[1])
    if not t_hi > t_lo or t_lo < 2:
        raise ValueError(f"window must satisfy t_hi > t_lo >= 2, got ({t_lo}, {t_hi})")
    if rounds is None:
        rounds = np.arange(1, len(values) + 1)
    else:
        rounds = np.asarray(rounds)
        if rounds.shape != values.shape:
            raise ValueError("rounds and values must have matching shapes")
    mask = (rounds >= t_lo) & (rounds <= t_hi)
    if int(mask.sum()) < 2:
        raise ValueError(
            f"window [{t_lo}, {t_hi}] covers fewer than 2 recorded rounds"
        )
    return np.log(rounds[mask].astype(float)), values[mask]


def fit_log_slope(
    values: np.ndarray,
    window: tuple[int, int],
    rounds: np.ndarray | None = None,
) -> float:
    """Least-squares slope of a regret curve against log t.

    ``values[i]`` is the cumulative regret at round ``rounds[i]``
    (rounds default to 1..len).  The window is inclusive in t.
    """
    x, y = _window_points(values, window, rounds)
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def log_fit_r2(
    values: np.ndarray,
    window: tuple[int, int],
    rounds: np.ndarray | None = None,
) -> float:
    """Coefficient of determination of the same linear-in-log-t fit."""
    x, y = _window_points(values, window, rounds)
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    ss_res = float(np.dot(residual, residual))
    centered = y - y.mean()
    ss_tot = float(np.dot(centered, centered))
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else 0.0
    return 1.0 - ss_res / ss_tot
