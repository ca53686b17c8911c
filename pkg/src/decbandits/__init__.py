"""Cooperative multi-armed bandits over communication networks.

Agents each play the same bandit, keep conjugate posteriors per arm,
temper their likelihood updates with a power eta, and pool posteriors
with their neighbours through a doubly stochastic weight matrix every
round.  The package provides the posterior algebra, graph/weight
construction, Thompson-sampling and quantile-index policies, a seeded
simulation engine with regret accounting, theoretical bound
evaluation, and a small CLI with preset experiments.
"""

from .analysis import (
    BoundInputs,
    RegretBound,
    asymptotic_slope,
    bound_curve,
    fit_log_slope,
    log_fit_r2,
    regret_upper_bound,
)
from .config import (
    ConfigError,
    ScenarioConfig,
    format_config,
    load_config,
    parse_config,
    to_scenario,
)
from .engine import (
    AggregateResult,
    RunTrace,
    Scenario,
    run_scenario,
    simulate_run,
    write_regret_csv,
)
from .environment import BanditInstance, suboptimality_gaps
from .network import (
    MatrixSchedule,
    Topology,
    build_metropolis,
    gossip_matrix,
    metropolis_weights,
    second_eigenvalue_modulus,
)
from .policy import PolicyConfig, quantile_level
from .posterior import (
    BetaBank,
    BetaPosterior,
    GaussianBank,
    GaussianPosterior,
    beta_params_from_history,
    merge_beta,
    merge_gaussian,
)
from .presets import expand_preset, preset_names

__version__ = "0.1.0"

__all__ = [
    "AggregateResult",
    "BanditInstance",
    "BetaBank",
    "BetaPosterior",
    "BoundInputs",
    "ConfigError",
    "GaussianBank",
    "GaussianPosterior",
    "MatrixSchedule",
    "PolicyConfig",
    "RegretBound",
    "RunTrace",
    "Scenario",
    "ScenarioConfig",
    "Topology",
    "asymptotic_slope",
    "beta_params_from_history",
    "bound_curve",
    "build_metropolis",
    "expand_preset",
    "fit_log_slope",
    "format_config",
    "gossip_matrix",
    "load_config",
    "log_fit_r2",
    "merge_beta",
    "merge_gaussian",
    "metropolis_weights",
    "parse_config",
    "preset_names",
    "quantile_level",
    "regret_upper_bound",
    "run_scenario",
    "second_eigenvalue_modulus",
    "simulate_run",
    "suboptimality_gaps",
    "to_scenario",
    "write_regret_csv",
]
