"""Flat key=value scenario files.

One scenario per file.  Lines are ``key = value``; ``#`` starts a
comment; blank lines are ignored; list values use brackets.  Example::

    family = bernoulli
    means = [0.5, 0.1, 0.1]
    n_agents = 64
    topology = grid
    topology_rows = 8
    topology_cols = 8
    schedule = static
    policy = dec_thompson
    horizon = 5000
    n_runs = 100
    seed = 1
    output = fig3_grid.csv

Parsing produces a :class:`ScenarioConfig`, a declarative record that
round-trips exactly through :func:`format_config`, and
:func:`to_scenario` turns it into the engine's runnable form.  All
validation failures carry the offending line number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .engine import Scenario
from .environment import FAMILIES, BanditInstance
from .network import MatrixSchedule, Topology, build_metropolis
from .policy import MERGE, POLICY_KINDS, PolicyConfig

SCHEDULE_KINDS = ("static", "gossip", "link_failure")
TOPOLOGY_KINDS = ("complete", "cycle", "k_regular", "grid")

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "parse_config",
    "load_config",
    "format_config",
    "build_topology",
    "to_scenario",
]


class ConfigError(ValueError):
    """Scenario file problem, anchored to a source line when known."""

    def __init__(self, message: str, source: str = "<config>", line: int | None = None):
        self.source = source
        self.line = line
        where = f"{source}, line {line}" if line is not None else source
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Declarative form of one experiment, as written in a file."""

    family: str
    means: tuple[float, ...]
    n_agents: int
    topology: str
    policy: str
    horizon: int
    noise_sd: float = 1.0
    topology_k: int | None = None
    topology_rows: int | None = None
    topology_cols: int | None = None
    schedule: str = "static"
    fail_prob: float | None = None
    eta: float | None = None
    quantile_c: float = 0.0
    n_runs: int = 1
    seed: int = 0
    record_every: int = 1
    regret_mode: str = "pseudo"
    output: str | None = None


def _parse_means(raw: str) -> tuple[float, ...]:
    raw = raw.strip()
    if not (raw.startswith("[") and raw.endswith("]")):
        raise ValueError("list values must be bracketed, like [0.5, 0.1]")
    inner = raw[1:-1].strip()
    if not inner:
        raise ValueError("means list must not be empty")
    values = []
    for part in inner.split(","):
        part = part.strip()
        if not part:
            raise ValueError("empty element in list value")
        values.append(float(part))
    return tuple(values)


def _parse_int(raw: str) -> int:
    try:
        return int(raw, 10)
    except ValueError:
        raise ValueError(f"expected an integer, got {raw!r}") from None


def _parse_float(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"expected a number, got {raw!r}") from None
    if math.isnan(value):
        raise ValueError("NaN is not a valid value")
    return value


def _parse_choice(options):
    def convert(raw: str) -> str:
        if raw not in options:
            raise ValueError(f"expected one of {', '.join(options)}; got {raw!r}")
        return raw

    return convert


def _parse_path(raw: str) -> str:
    if not raw:
        raise ValueError("empty path")
    return raw


_CONVERTERS = {
    "family": _parse_choice(FAMILIES),
    "means": _parse_means,
    "noise_sd": _parse_float,
    "n_agents": _parse_int,
    "topology": _parse_choice(TOPOLOGY_KINDS),
    "topology_k": _parse_int,
    "topology_rows": _parse_int,
    "topology_cols": _parse_int,
    "schedule": _parse_choice(SCHEDULE_KINDS),
    "fail_prob": _parse_float,
    "policy": _parse_choice(POLICY_KINDS),
    "eta": _parse_float,
    "quantile_c": _parse_float,
    "horizon": _parse_int,
    "n_runs": _parse_int,
    "seed": _parse_int,
    "record_every": _parse_int,
    "regret_mode": _parse_choice(("pseudo", "realized")),
    "output": _parse_path,
}

_REQUIRED = ("family", "means", "n_agents", "topology", "policy", "horizon")


def parse_config(text: str, source: str = "<config>") -> ScenarioConfig:
    """Parse a scenario document; raise :class:`ConfigError` on problems."""
    entries: dict[str, object] = {}
    key_lines: dict[str, int] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", source, lineno)
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in _CONVERTERS:
            raise ConfigError(f"unknown key {key!r}", source, lineno)
        if key in entries:
            raise ConfigError(
                f"duplicate key {key!r} (first set on line {key_lines[key]})",
                source,
                lineno,
            )
        if not raw_value:
            raise ConfigError(f"missing value for {key!r}", source, lineno)
        try:
            entries[key] = _CONVERTERS[key](raw_value)
        except ValueError as exc:
            raise ConfigError(str(exc), source, lineno) from None
        key_lines[key] = lineno

    for key in _REQUIRED:
        if key not in entries:
            raise ConfigError(f"missing required key {key!r}", source)

    cfg = ScenarioConfig(**entries)
    _validate(cfg, source, key_lines)
    return cfg


def load_config(path) -> ScenarioConfig:
    """Read and parse a scenario file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, source=str(path))


def _anchored(source: str, key_lines: dict[str, int], key: str, message: str):
    return ConfigError(message, source, key_lines.get(key))


def _validate(cfg: ScenarioConfig, source: str, key_lines: dict[str, int]) -> None:
    try:
        BanditInstance(cfg.family, cfg.means, noise_sd=cfg.noise_sd)
    except ValueError as exc:
        raise _anchored(source, key_lines, "means", str(exc)) from None
    if cfg.n_agents < 1:
        raise _anchored(
            source, key_lines, "n_agents", f"n_agents must be >= 1, got {cfg.n_agents}"
        )
    try:
        build_topology(cfg)
    except ValueError as exc:
        raise _anchored(source, key_lines, "topology", str(exc)) from None
    if cfg.schedule == "link_failure":
        if cfg.fail_prob is None:
            raise _anchored(
                source, key_lines, "schedule", "link_failure schedule needs fail_prob"
            )
        if not 0.0 <= cfg.fail_prob <= 1.0:
            raise _anchored(
                source,
                key_lines,
                "fail_prob",
                f"fail_prob must lie in [0, 1], got {cfg.fail_prob}",
            )
    elif cfg.fail_prob is not None:
        raise _anchored(
            source,
            key_lines,
            "fail_prob",
            f"fail_prob only applies to the link_failure schedule, not {cfg.schedule!r}",
        )
    try:
        _build_policy(cfg)
    except ValueError as exc:
        anchor = "eta" if "eta" in str(exc) and "eta" in key_lines else "policy"
        raise _anchored(source, key_lines, anchor, str(exc)) from None
    for key, minimum in (("horizon", 1), ("n_runs", 1), ("record_every", 1)):
        if getattr(cfg, key) < minimum:
            raise _anchored(
                source, key_lines, key, f"{key} must be >= {minimum}, got {getattr(cfg, key)}"
            )
    if cfg.seed < 0:
        raise _anchored(
            source, key_lines, "seed", f"seed must be non-negative, got {cfg.seed}"
        )


def build_topology(cfg: ScenarioConfig) -> Topology:
    """Topology object described by the config's topology keys."""
    n = cfg.n_agents
    kind = cfg.topology
    if kind != "k_regular" and cfg.topology_k is not None:
        raise ValueError("topology_k only applies to the k_regular topology")
    if kind != "grid" and (cfg.topology_rows is not None or cfg.topology_cols is not None):
        raise ValueError("topology_rows/topology_cols only apply to the grid topology")
    if kind == "complete":
        return Topology.complete(n)
    if kind == "cycle":
        return Topology.cycle(n)
    if kind == "k_regular":
        if cfg.topology_k is None:
            raise ValueError("k_regular topology needs topology_k")
        return Topology.k_regular(n, cfg.topology_k)
    # grid: omitted dimensions fall back to a square when possible
    rows, cols = cfg.topology_rows, cfg.topology_cols
    if rows is None and cols is None:
        side = math.isqrt(n)
        if side * side != n:
            raise ValueError(
                f"{n} agents do not form a square grid; set topology_rows/topology_cols"
            )
        rows = cols = side
    elif rows is None or cols is None:
        given = rows if rows is not None else cols
        if given < 1 or n % given != 0:
            raise ValueError(
                f"grid dimension {given} does not divide {n} agents"
            )
        rows = given if rows is not None else n // given
        cols = n // rows
    if rows * cols != n:
        raise ValueError(
            f"grid {rows}x{cols} does not hold {n} agents"
        )
    return Topology.grid(rows, cols)


def _build_policy(cfg: ScenarioConfig) -> PolicyConfig:
    return PolicyConfig(
        kind=cfg.policy,
        eta=cfg.eta,
        quantile_c=cfg.quantile_c,
        horizon=cfg.horizon if cfg.policy == "dec_bayes_ucb" else None,
    )


def to_scenario(cfg: ScenarioConfig) -> Scenario:
    """Runnable scenario for the engine."""
    instance = BanditInstance(cfg.family, cfg.means, noise_sd=cfg.noise_sd)
    policy = _build_policy(cfg)
    schedule = None
    if policy.communication == MERGE:
        if cfg.schedule == "static":
            schedule = MatrixSchedule.static(build_metropolis(build_topology(cfg)))
        elif cfg.schedule == "gossip":
            schedule = MatrixSchedule.gossip(cfg.n_agents)
        else:
            schedule = MatrixSchedule.link_failure(build_topology(cfg), cfg.fail_prob)
    return Scenario(
        instance=instance,
        n_agents=cfg.n_agents,
        policy=policy,
        horizon=cfg.horizon,
        schedule=schedule,
        n_runs=cfg.n_runs,
        master_seed=cfg.seed,
        record_every=cfg.record_every,
        regret_mode=cfg.regret_mode,
    )


def format_config(cfg: ScenarioConfig) -> str:
    """Render a config document that parses back to an equal config."""
    lines = []
    for f in fields(ScenarioConfig):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        if f.name == "means":
            rendered = "[" + ", ".join(repr(float(m)) for m in value) + "]"
        elif isinstance(value, float):
            rendered = repr(value)
        else:
            rendered = str(value)
        lines.append(f"{f.name} = {rendered}")
    return "\n".join(lines) + "\n"
