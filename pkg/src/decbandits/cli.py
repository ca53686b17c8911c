"""Command-line front-end.

Verbs:

* ``run <config>``         simulate one scenario file, write its regret
                           CSV and a key=value stats sidecar;
* ``bound <config>``       evaluate the theoretical regret bound for a
                           Bernoulli scenario over t = 1..T, in the same
                           CSV schema as regret curves;
* ``presets``              list the built-in experiments;
* ``run-preset <name>``    expand a preset and run every variant.

Every file written is reported on standard output.  Exit status is 0 on
success, 2 for configuration problems, 1 for runtime failures.
"""

from __future__ import annotations

import argparse
import os
import sys

from .analysis import BoundInputs, asymptotic_slope, bound_curve, regret_upper_bound
from .config import (
    ConfigError,
    ScenarioConfig,
    build_topology,
    load_config,
    to_scenario,
)
from .engine import (
    AggregateResult,
    run_scenario,
    write_per_run_csv,
    write_regret_csv,
    write_stats_sidecar,
    _atomic_write_text,
)
from .network import build_metropolis, second_eigenvalue_modulus
from .presets import expand_preset, preset_description, preset_names

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decbandits",
        description="Cooperative bandit simulations over communication networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one scenario file")
    p_run.add_argument("config", help="path to a scenario file")
    p_run.add_argument("--out-dir", default=".", help="directory for output files")
    p_run.add_argument("--jobs", type=int, default=1, help="worker processes")
    p_run.add_argument(
        "--per-run", action="store_true", help="also write per-run curves"
    )

    p_bound = sub.add_parser("bound", help="evaluate the regret bound for a scenario")
    p_bound.add_argument("config", help="path to a Bernoulli scenario file")
    p_bound.add_argument("--out-dir", default=".", help="directory for output files")
    p_bound.add_argument(
        "--epsilon", type=float, default=1.0, help="slack parameter of the bound"
    )

    sub.add_parser("presets", help="list built-in preset experiments")

    p_rp = sub.add_parser("run-preset", help="run every variant of a preset")
    p_rp.add_argument("name", help="preset name (see the presets verb)")
    p_rp.add_argument("--runs", type=int, default=None, help="Monte Carlo runs")
    p_rp.add_argument("--seed", type=int, default=None, help="master seed")
    p_rp.add_argument("--horizon", type=int, default=None, help="rounds per run")
    p_rp.add_argument("--out-dir", default=".", help="directory for output files")
    p_rp.add_argument("--jobs", type=int, default=1, help="worker processes")
    return parser


def _output_path(cfg: ScenarioConfig, config_path: str, out_dir: str) -> str:
    name = cfg.output
    if name is None:
        stem = os.path.splitext(os.path.basename(config_path))[0]
        name = f"{stem}.csv"
    if os.path.isabs(name):
        return name
    return os.path.join(out_dir, name)


def _run_one(cfg: ScenarioConfig, out_path: str, jobs: int, per_run: bool) -> AggregateResult:
    scenario = to_scenario(cfg)
    result = run_scenario(scenario, keep_traces=per_run, n_jobs=jobs)
    write_regret_csv(out_path, result)
    print(f"wrote {out_path}")
    stats_path = f"{os.path.splitext(out_path)[0]}.stats"
    write_stats_sidecar(stats_path, scenario, result)
    print(f"wrote {stats_path}")
    if per_run:
        per_run_path = f"{os.path.splitext(out_path)[0]}_runs.csv"
        write_per_run_csv(per_run_path, result)
        print(f"wrote {per_run_path}")
    return result


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    out_path = _output_path(cfg, args.config, args.out_dir)
    _run_one(cfg, out_path, args.jobs, args.per_run)
    return 0


def _cmd_bound(args) -> int:
    cfg = load_config(args.config)
    scenario = to_scenario(cfg)
    if scenario.instance.family != "bernoulli":
        raise ConfigError(
            "the regret bound applies to bernoulli scenarios only",
            source=args.config,
        )
    if cfg.n_agents == 1:
        lambda2 = 0.0
    else:
        W = build_metropolis(build_topology(cfg))
        lambda2 = second_eigenvalue_modulus(W)
    inputs = BoundInputs(
        instance=scenario.instance,
        n_agents=cfg.n_agents,
        lambda2=lambda2,
        epsilon=args.epsilon,
        horizon=cfg.horizon,
    )
    curve = bound_curve(inputs)
    terms = regret_upper_bound(inputs)
    slope = asymptotic_slope(scenario.instance, cfg.n_agents)

    out_path = _output_path(cfg, args.config, args.out_dir)
    stem = os.path.splitext(out_path)[0]
    curve_path = f"{stem}_bound.csv"
    lines = ["round,mean_regret,stderr_regret"]
    for t, value in enumerate(curve, start=1):
        lines.append(f"{t},{float(value)!r},0.0")
    _atomic_write_text(curve_path, "\n".join(lines) + "\n")
    print(f"wrote {curve_path}")

    stats_path = f"{stem}_bound.stats"
    pairs = [
        ("asymptotic_slope", repr(slope)),
        ("kl_term_at_horizon", repr(terms.kl_term)),
        ("network_term", repr(terms.network_term)),
        ("remainder_exponent_n_tilde", repr(terms.n_tilde)),
        ("epsilon", repr(float(args.epsilon))),
        ("lambda2", repr(lambda2)),
        ("horizon", cfg.horizon),
        ("n_agents", cfg.n_agents),
    ]
    _atomic_write_text(stats_path, "\n".join(f"{k}={v}" for k, v in pairs) + "\n")
    print(f"wrote {stats_path}")
    return 0


def _cmd_presets(args) -> int:
    for name in preset_names():
        n_variants = len(expand_preset(name))
        print(f"{name}  ({n_variants} variants)  {preset_description(name)}")
    return 0


def _cmd_run_preset(args) -> int:
    try:
        variants = expand_preset(
            args.name, n_runs=args.runs, seed=args.seed, horizon=args.horizon
        )
    except KeyError as exc:
        print(exc.args[0], file=sys.stderr)
        return 2
    for variant_name, cfg in variants:
        out_path = _output_path(cfg, variant_name, args.out_dir)
        _run_one(cfg, out_path, args.jobs, per_run=False)
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "bound": _cmd_bound,
    "presets": _cmd_presets,
    "run-preset": _cmd_run_preset,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
