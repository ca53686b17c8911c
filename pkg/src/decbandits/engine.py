"""Synchronous simulation loop, regret accounting, and aggregation.

A run proceeds in rounds.  Each round has two strictly ordered phases:

1. every agent selects an arm with the policy, draws a reward, and
   applies the tempered update to its own posterior bank;
2. every agent replaces its bank with the weighted pool of its
   neighbours' phase-1 banks (a row of the round's weight matrix).

All updates complete before any merge reads, which is what makes the
closed-form reconstruction in :mod:`decbandits.posterior` an exact
oracle for the loop under a static matrix.

Per-agent randomness comes from the stream layout documented in
:mod:`decbandits.environment`; reward noise is presampled into per-run
tables so the inner loop is a handful of vectorized operations.  Runs
are aggregated by run index, so results do not depend on execution
order or on how many workers were used.

Regret is cumulative network-averaged pseudo-regret
(1/N) sum_i sum_{tau<=t} gap(arm played by i in round tau) by default;
a ``realized`` mode subtracts actually-drawn rewards from the draw the
best arm would have paid the same agent in the same round.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .environment import (
    BanditInstance,
    policy_stream,
    presample_rewards,
    reward_stream,
    schedule_seed,
    suboptimality_gaps,
)
from .network import MatrixSchedule
from .policy import MERGE, NO_MERGE, SHARED, PolicyConfig, quantile_level
from .posterior import BetaBank, GaussianBank

REGRET_MODES = ("pseudo", "realized")

__all__ = [
    "REGRET_MODES",
    "Scenario",
    "RunTrace",
    "AggregateResult",
    "messages_for_matrix",
    "run_round",
    "simulate_run",
    "run_scenario",
    "write_regret_csv",
    "write_per_run_csv",
    "write_stats_sidecar",
]


@dataclass(frozen=True)
class Scenario:
    """Everything needed to reproduce one experiment."""

    instance: BanditInstance
    n_agents: int
    policy: PolicyConfig
    horizon: int
    schedule: MatrixSchedule | None = None
    n_runs: int = 1
    master_seed: int = 0
    record_every: int = 1
    regret_mode: str = "pseudo"
    beta_prior: tuple[float, float] = (1.0, 1.0)
    gaussian_prior: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self) -> None:
        if self.n_agents < 1:
            raise ValueError(f"n_agents must be >= 1, got {self.n_agents}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.n_runs < 1:
            raise ValueError(f"n_runs must be >= 1, got {self.n_runs}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")
        if self.regret_mode not in REGRET_MODES:
            raise ValueError(
                f"regret_mode must be one of {REGRET_MODES}, got {self.regret_mode!r}"
            )
        if int(self.master_seed) < 0:
            raise ValueError(f"master_seed must be non-negative, got {self.master_seed}")
        if self.policy.communication == MERGE:
            if self.schedule is None:
                raise ValueError(
                    f"policy {self.policy.kind!r} exchanges posteriors and needs a schedule"
                )
            if self.schedule.n != self.n_agents:
                raise ValueError(
                    f"schedule is for {self.schedule.n} agents, scenario has {self.n_agents}"
                )

    @property
    def recorded_rounds(self) -> np.ndarray:
        """Round numbers at which the regret curve is recorded."""
        rounds = list(range(self.record_every, self.horizon + 1, self.record_every))
        if not rounds or rounds[-1] != self.horizon:
            rounds.append(self.horizon)
        return np.asarray(rounds, dtype=int)


@dataclass
class RunTrace:
    """Everything recorded about one run."""

    run_index: int
    rounds: np.ndarray
    regret: np.ndarray
    messages: int
    arms: np.ndarray | None = None        # (horizon, agents) plays
    rewards: np.ndarray | None = None     # (horizon, agents) payoffs
    params_a: np.ndarray | None = None    # (horizon+1, agents, arms)
    params_b: np.ndarray | None = None    # snapshots: entry t is the bank
    #                                       at the start of round t+1


@dataclass
class AggregateResult:
    """Mean regret curve with standard errors over the runs."""

    rounds: np.ndarray
    mean_regret: np.ndarray
    stderr_regret: np.ndarray
    n_runs: int
    mean_messages: float
    traces: list[RunTrace] | None = None

    @property
    def final_mean(self) -> float:
        return float(self.mean_regret[-1])

    @property
    def final_stderr(self) -> float:
        return float(self.stderr_regret[-1])


def messages_for_matrix(W: np.ndarray, n_arms: int) -> int:
    """Posterior messages one merge round costs: every agent sends its
    K arm-posteriors to each out-neighbour with positive weight."""
    W = np.asarray(W)
    off_diag = int(np.count_nonzero(W > 0.0)) - int(np.count_nonzero(np.diagonal(W) > 0.0))
    return off_diag * int(n_arms)


def _make_bank(
    instance: BanditInstance,
    n_agents: int,
    beta_prior: tuple[float, float],
    gaussian_prior: tuple[float, float],
):
    if instance.family == "bernoulli":
        return BetaBank(n_agents, instance.n_arms, prior=beta_prior)
    return GaussianBank(
        n_agents, instance.n_arms, noise_sd=instance.noise_sd, prior=gaussian_prior
    )


def run_round(
    bank,
    W_t: np.ndarray | None,
    instance: BanditInstance,
    policy: PolicyConfig,
    t: int,
    policy_rng: np.random.Generator,
    rewards_t: np.ndarray,
    eta: float,
) -> tuple[np.ndarray, np.ndarray]:
    """One two-phase round over the whole network, in place.

    ``rewards_t`` is the (agents, arms) table of the rewards each arm
    would pay each agent this round.  Passing ``W_t = None`` skips the
    merge phase (equivalent to an identity matrix).  Returns the arms
    played and the rewards collected, one per agent.
    """
    if policy.uses_quantiles:
        level = quantile_level(t, policy.horizon, policy.quantile_c)
        index_values = bank.quantile_matrix(level)
    else:
        index_values = bank.thompson_sample(policy_rng)
    arms = np.argmax(index_values, axis=1)
    rewards = rewards_t[np.arange(bank.n_agents), arms]
    bank.update(arms, rewards, eta)
    if W_t is not None:
        bank.merge(W_t)
    return arms, rewards


def _centralized_round(
    bank,
    n_agents: int,
    policy_rng: np.random.Generator,
    rewards_t: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """All agents act on one shared posterior; every observation is
    applied to it with eta = 1."""
    if isinstance(bank, BetaBank):
        a = np.broadcast_to(bank.alpha[0], (n_agents, bank.n_arms))
        b = np.broadcast_to(bank.beta[0], (n_agents, bank.n_arms))
        samples = policy_rng.beta(a, b)
    else:
        sd = 1.0 / np.sqrt(bank.precision[0])
        samples = bank.mean[0] + sd * policy_rng.standard_normal(
            (n_agents, bank.n_arms)
        )
    arms = np.argmax(samples, axis=1)
    rewards = rewards_t[np.arange(n_agents), arms]
    if isinstance(bank, BetaBank):
        np.add.at(bank.alpha[0], arms, rewards)
        np.add.at(bank.beta[0], arms, 1.0 - rewards)
    else:
        obs_prec = 1.0 / (bank.noise_sd * bank.noise_sd)
        np.add.at(bank.precision[0], arms, obs_prec)
        np.add.at(bank.prec_mean[0], arms, obs_prec * rewards)
    return arms, rewards


def simulate_run(
    scenario: Scenario,
    run_index: int,
    record_plays: bool = False,
    record_params: bool = False,
) -> RunTrace:
    """Execute one seeded run of the scenario."""
    inst = scenario.instance
    n = scenario.n_agents
    n_arms = inst.n_arms
    horizon = scenario.horizon
    policy = scenario.policy
    comm = policy.communication
    eta = policy.resolved_eta(n)
    seed = scenario.master_seed

    pol_rng = policy_stream(seed, run_index, n)
    reward_tables = np.empty((horizon, n, n_arms))
    for agent in range(n):
        reward_tables[:, agent, :] = presample_rewards(
            inst, reward_stream(seed, run_index, agent), horizon
        )

    schedule = scenario.schedule
    static_W = None
    static_messages = 0
    if comm == MERGE:
        if schedule.is_static():
            static_W = schedule.matrix
            static_messages = messages_for_matrix(static_W, n_arms)
        else:
            schedule = schedule.reseeded(schedule_seed(seed, run_index, n))

    bank_agents = 1 if comm == SHARED else n
    bank = _make_bank(inst, bank_agents, scenario.beta_prior, scenario.gaussian_prior)

    gaps = suboptimality_gaps(inst)
    best = inst.best_arm
    realized = scenario.regret_mode == "realized"

    recorded = scenario.recorded_rounds
    regret_out = np.empty(len(recorded))
    next_record = 0
    cumulative = 0.0
    messages = 0

    arms_hist = np.empty((horizon, n), dtype=np.int64) if record_plays else None
    rewards_hist = np.empty((horizon, n)) if record_plays else None
    params_a = params_b = None
    if record_params:
        params_a = np.empty((horizon + 1, n, n_arms))
        params_b = np.empty((horizon + 1, n, n_arms))
        _snapshot_params(bank, comm, n, params_a[0], params_b[0])

    for t in range(1, horizon + 1):
        rewards_t = reward_tables[t - 1]
        if comm == SHARED:
            arms, rewards = _centralized_round(bank, n, pol_rng, rewards_t)
            messages += n * (n - 1) * n_arms
        elif comm == NO_MERGE:
            arms, rewards = run_round(
                bank, None, inst, policy, t, pol_rng, rewards_t, eta
            )
        else:
            W_t = static_W if static_W is not None else schedule.matrix_for_round(t)
            arms, rewards = run_round(
                bank, W_t, inst, policy, t, pol_rng, rewards_t, eta
            )
            messages += (
                static_messages
                if static_W is not None
                else messages_for_matrix(W_t, n_arms)
            )

        if realized:
            cumulative += float((rewards_t[:, best] - rewards).sum()) / n
        else:
            cumulative += float(gaps[arms].sum()) / n

        if record_plays:
            arms_hist[t - 1] = arms
            rewards_hist[t - 1] = rewards
        if record_params:
            _snapshot_params(bank, comm, n, params_a[t], params_b[t])
        if t == recorded[next_record]:
            regret_out[next_record] = cumulative
            next_record += 1

    return RunTrace(
        run_index=run_index,
        rounds=recorded,
        regret=regret_out,
        messages=messages,
        arms=arms_hist,
        rewards=rewards_hist,
        params_a=params_a,
        params_b=params_b,
    )


def _snapshot_params(bank, comm, n, out_a, out_b) -> None:
    if isinstance(bank, BetaBank):
        a, b = bank.alpha, bank.beta
    else:
        a, b = bank.precision, bank.prec_mean
    if comm == SHARED:
        out_a[:] = a[0]
        out_b[:] = b[0]
    else:
        out_a[:] = a
        out_b[:] = b


def _simulate_run_star(args) -> RunTrace:
    return simulate_run(*args)


def run_scenario(
    scenario: Scenario,
    record_plays: bool = False,
    record_params: bool = False,
    keep_traces: bool = False,
    n_jobs: int = 1,
) -> AggregateResult:
    """Execute all runs of the scenario and aggregate the curves.

    Runs use independent derived seeds and are reduced in run-index
    order, so the result is a pure function of the scenario no matter
    how many worker processes are used.
    """
    jobs = [
        (scenario, r, record_plays, record_params) for r in range(scenario.n_runs)
    ]
    if n_jobs > 1 and scenario.n_runs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            traces = list(pool.map(_simulate_run_star, jobs))
    else:
        traces = [_simulate_run_star(job) for job in jobs]
    traces.sort(key=lambda tr: tr.run_index)

    curves = np.stack([tr.regret for tr in traces])
    mean = curves.mean(axis=0)
    if len(traces) > 1:
        stderr = curves.std(axis=0, ddof=1) / np.sqrt(len(traces))
    else:
        stderr = np.zeros_like(mean)
    keep = keep_traces or record_plays or record_params
    return AggregateResult(
        rounds=traces[0].rounds,
        mean_regret=mean,
        stderr_regret=stderr,
        n_runs=len(traces),
        mean_messages=float(np.mean([tr.messages for tr in traces])),
        traces=traces if keep else None,
    )


def _atomic_write_text(path: str, text: str) -> None:
    path = os.fspath(path)
    tmp = f"{path}.tmp.{os.getpid()}"
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_regret_csv(path, result: AggregateResult) -> None:
    """Regret curve as ``round,mean_regret,stderr_regret``.

    Floats are formatted with ``repr`` (shortest round-trip form), so
    equal results produce byte-identical files.
    """
    lines = ["round,mean_regret,stderr_regret"]
    for t, m, s in zip(result.rounds, result.mean_regret, result.stderr_regret):
        lines.append(f"{int(t)},{float(m)!r},{float(s)!r}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def write_per_run_csv(path, result: AggregateResult) -> None:
    """Per-run curves as ``run,round,regret`` (needs kept traces)."""
    if result.traces is None:
        raise ValueError("per-run output needs run_scenario(keep_traces=True)")
    lines = ["run,round,regret"]
    for tr in result.traces:
        for t, x in zip(tr.rounds, tr.regret):
            lines.append(f"{tr.run_index},{int(t)},{float(x)!r}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def write_stats_sidecar(path, scenario: Scenario, result: AggregateResult) -> None:
    """Key=value run summary next to the CSV."""
    pairs = [
        ("family", scenario.instance.family),
        ("n_arms", scenario.instance.n_arms),
        ("n_agents", scenario.n_agents),
        ("policy", scenario.policy.kind),
        ("eta", repr(scenario.policy.resolved_eta(scenario.n_agents))),
        ("horizon", scenario.horizon),
        ("n_runs", result.n_runs),
        ("master_seed", scenario.master_seed),
        ("regret_mode", scenario.regret_mode),
        ("mean_messages_per_run", repr(result.mean_messages)),
        ("final_mean_regret", repr(result.final_mean)),
        ("final_stderr_regret", repr(result.final_stderr)),
    ]
    text = "\n".join(f"{k}={v}" for k, v in pairs) + "\n"
    _atomic_write_text(path, text)
