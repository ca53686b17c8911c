"""Named preset experiments.

Each preset expands to one or more scenario configs (a preset that
sweeps a parameter produces one variant per value, with the value in
the variant name).  Defaults: 100 Monte Carlo runs and seed 1; runs,
seed, and horizon can be overridden without touching anything else.
Variant output files default to ``<variant>.csv``.

The shared arm sets:

* ``hard17``  one arm at 0.5 and sixteen at 0.1 (used as both a
  Bernoulli and a sigma = 1 Gaussian instance);
* ``fig2``    20 Gaussian arms with means drawn uniformly from [0, 1]
  using the preset seed, so changing the seed changes the instance.
"""

from __future__ import annotations

import numpy as np

from .config import ScenarioConfig

DEFAULT_RUNS = 100
DEFAULT_SEED = 1

__all__ = [
    "DEFAULT_RUNS",
    "DEFAULT_SEED",
    "preset_names",
    "preset_description",
    "expand_preset",
]

_HARD17 = (0.5,) + (0.1,) * 16

_DESCRIPTIONS = {
    "fig1_cycle": "100 agents on a cycle, 17 Gaussian arms: cooperative vs isolated Thompson",
    "fig1_grid": "100 agents on a 10x10 grid, 17 Gaussian arms: cooperative vs isolated Thompson",
    "fig2_cycle20": "20 agents on a cycle, 20 random Gaussian arms: Thompson vs quantile rule",
    "fig3_topology": "64 agents, 17 Bernoulli arms: complete / 5-regular / 3-regular / grid",
    "fig4_complete": "17 Bernoulli arms on complete graphs of 36..144 agents",
    "fig4_cycle": "17 Bernoulli arms on cycles of 36..144 agents",
    "fig5_gossip": "64 agents, 17 Gaussian arms: random pairwise gossip vs static complete",
    "fig5_linkfail": "64 agents, 17 Gaussian arms, complete graph with links failing at p in {0.3, 0.8, 0.9}",
}


def preset_names() -> list[str]:
    return list(_DESCRIPTIONS)


def preset_description(name: str) -> str:
    _check_name(name)
    return _DESCRIPTIONS[name]


def _check_name(name: str) -> None:
    if name not in _DESCRIPTIONS:
        known = ", ".join(_DESCRIPTIONS)
        raise KeyError(f"unknown preset {name!r}; known presets: {known}")


def _fig2_means(seed: int, n_arms: int = 20) -> tuple[float, ...]:
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0,)))
    return tuple(float(m) for m in rng.random(n_arms))


def expand_preset(
    name: str,
    n_runs: int | None = None,
    seed: int | None = None,
    horizon: int | None = None,
) -> list[tuple[str, ScenarioConfig]]:
    """Variant configs of one preset, as (variant_name, config) pairs."""
    _check_name(name)
    runs = DEFAULT_RUNS if n_runs is None else int(n_runs)
    seed = DEFAULT_SEED if seed is None else int(seed)

    def cfg(suffix: str, horizon_default: int, **kw) -> tuple[str, ScenarioConfig]:
        variant = f"{name}_{suffix}" if suffix else name
        t = horizon_default if horizon is None else int(horizon)
        base = dict(
            horizon=t,
            n_runs=runs,
            seed=seed,
            output=f"{variant}.csv",
        )
        base.update(kw)
        return variant, ScenarioConfig(**base)

    gauss17 = dict(family="gaussian", means=_HARD17, noise_sd=1.0)
    bern17 = dict(family="bernoulli", means=_HARD17)

    if name in ("fig1_cycle", "fig1_grid"):
        topo = (
            dict(topology="cycle")
            if name == "fig1_cycle"
            else dict(topology="grid", topology_rows=10, topology_cols=10)
        )
        common = dict(n_agents=100, **gauss17, **topo)
        return [
            cfg("dec_thompson", 5000, policy="dec_thompson", **common),
            cfg("isolated_thompson", 5000, policy="isolated_thompson", **common),
        ]

    if name == "fig2_cycle20":
        common = dict(
            family="gaussian",
            means=_fig2_means(seed),
            noise_sd=1.0,
            n_agents=20,
            topology="cycle",
        )
        return [
            cfg("dec_thompson", 5000, policy="dec_thompson", **common),
            cfg("dec_bayes_ucb", 5000, policy="dec_bayes_ucb", **common),
        ]

    if name == "fig3_topology":
        common = dict(n_agents=64, policy="dec_thompson", **bern17)
        return [
            cfg("complete", 5000, topology="complete", **common),
            cfg("5regular", 5000, topology="k_regular", topology_k=5, **common),
            cfg("3regular", 5000, topology="k_regular", topology_k=3, **common),
            cfg("grid", 5000, topology="grid", topology_rows=8, topology_cols=8, **common),
        ]

    if name in ("fig4_complete", "fig4_cycle"):
        topology = "complete" if name == "fig4_complete" else "cycle"
        return [
            cfg(
                f"n{n}",
                5000,
                n_agents=n,
                topology=topology,
                policy="dec_thompson",
                **bern17,
            )
            for n in (36, 64, 81, 100, 144)
        ]

    if name == "fig5_gossip":
        common = dict(n_agents=64, policy="dec_thompson", topology="complete", **gauss17)
        return [
            cfg("gossip", 20000, schedule="gossip", **common),
            cfg("static_complete", 20000, schedule="static", **common),
        ]

    # fig5_linkfail
    common = dict(n_agents=64, policy="dec_thompson", topology="complete", **gauss17)
    return [
        cfg(f"p{int(round(p * 10)):02d}", 5000, schedule="link_failure", fail_prob=p, **common)
        for p in (0.3, 0.8, 0.9)
    ]
