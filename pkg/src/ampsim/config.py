"""Scenario configuration: radio, traffic, mobility, protocol and presets.

A scenario is fully described by one `ScenarioConfig`; two runs with equal
configs (seed included) produce byte-identical metrics. Configs load from
YAML files whose keys mirror the dataclass fields.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .geometry import NodeId
from .messages import ProtocolVariant
from .mobility import MobilityConfig
from .protocol import ProtocolConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RadioConfig:
    range: float = 250.0
    per_hop_latency: float = 0.002
    loss_probability: float = 0.0

    def __post_init__(self):
        if self.range <= 0:
            raise ConfigError("radio range must be positive")
        if self.per_hop_latency <= 0:
            raise ConfigError("per-hop latency must be positive")
        if not 0.0 <= self.loss_probability <= 1.0:
            raise ConfigError("loss probability must lie in [0, 1]")


@dataclass(frozen=True)
class Flow:
    source: NodeId
    destination: NodeId
    rate: float = 5.0            # packets per second
    packet_size: int = 512       # bytes
    start_time: float = 0.0
    stop_time: float = 900.0

    def __post_init__(self):
        if self.source == self.destination:
            raise ConfigError("flow source and destination must differ")
        if self.rate <= 0:
            raise ConfigError("flow rate must be positive")
        if self.stop_time < self.start_time:
            raise ConfigError("flow stops before it starts")


@dataclass(frozen=True)
class ScenarioConfig:
    node_count: int = 30
    area_width: float = 800.0
    area_height: float = 600.0
    sim_time: float = 900.0
    seed: int = 1
    variant: ProtocolVariant = ProtocolVariant.AODV
    radio: RadioConfig = field(default_factory=RadioConfig)
    v_min: float = 1.0
    v_max: float = 20.0
    pause_time: float = 0.0
    flow_pairs: int = 5          # used when no explicit flow list is given
    flow_rate: float = 5.0
    packet_size: int = 512
    flows: tuple[Flow, ...] | None = None
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    metrics_sample_interval: float | None = None

    def __post_init__(self):
        if self.node_count < 2:
            raise ConfigError("need at least two nodes")
        if self.sim_time <= 0:
            raise ConfigError("sim_time must be positive")
        if self.flows is not None:
            for f in self.flows:
                if not (0 <= f.source < self.node_count and 0 <= f.destination < self.node_count):
                    raise ConfigError(f"flow endpoint out of range: {f}")
        elif 2 * self.flow_pairs > self.node_count:
            raise ConfigError(f"{self.flow_pairs} disjoint pairs need "
                              f"{2 * self.flow_pairs} nodes, have {self.node_count}")

    def mobility_config(self) -> MobilityConfig:
        return MobilityConfig(area_width=self.area_width, area_height=self.area_height,
                              v_min=self.v_min, v_max=self.v_max,
                              pause_time=self.pause_time, rng_seed=self.seed)

    def resolved_flows(self) -> tuple[Flow, ...]:
        """Explicit flows, or seeded disjoint source/destination pairs."""
        if self.flows is not None:
            return self.flows
        rng = random.Random(f"{self.seed}/flows")
        endpoints = rng.sample(range(self.node_count), 2 * self.flow_pairs)
        return tuple(Flow(source=endpoints[2 * i], destination=endpoints[2 * i + 1],
                          rate=self.flow_rate, packet_size=self.packet_size,
                          start_time=0.0, stop_time=self.sim_time)
                     for i in range(self.flow_pairs))


def desk_scenario(**overrides) -> ScenarioConfig:
    """Small field that keeps the density of the full-scale setup."""
    return replace(ScenarioConfig(), **overrides)


def paper_scenario(**overrides) -> ScenarioConfig:
    """Full-scale setup: 100 nodes on 2 km x 1.5 km, ten traffic pairs.

    The collection window and retry timeout scale with the larger network
    diameter.
    """
    base = ScenarioConfig(node_count=100, area_width=2000.0, area_height=1500.0,
                          flow_pairs=10,
                          protocol=ProtocolConfig(collection_window=0.05,
                                                  rreq_retry_timeout=0.3))
    return replace(base, **overrides)


PRESETS = {"desk": desk_scenario, "paper": paper_scenario}

_VARIANTS = {v.value: v for v in ProtocolVariant}


def variant_from_name(name: str) -> ProtocolVariant:
    try:
        return _VARIANTS[name.lower()]
    except KeyError:
        raise ConfigError(f"unknown variant {name!r}; pick one of {sorted(_VARIANTS)}") from None


def load_config(path: str | Path, preset: str = "desk", **overrides) -> ScenarioConfig:
    """Build a ScenarioConfig from a YAML file layered over a preset."""
    with open(path) as fh:
        raw = yaml.safe_load(fh) or {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a mapping at top level")
    return config_from_dict(raw, preset=preset, **overrides)


def config_from_dict(raw: dict, preset: str = "desk", **overrides) -> ScenarioConfig:
    raw = dict(raw)
    kwargs = {}
    if "variant" in raw:
        kwargs["variant"] = variant_from_name(str(raw.pop("variant")))
    try:
        if "radio" in raw:
            kwargs["radio"] = RadioConfig(**raw.pop("radio"))
        if "protocol" in raw:
            kwargs["protocol"] = ProtocolConfig(**raw.pop("protocol"))
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    if "mobility" in raw:
        mob = raw.pop("mobility")
        for k in ("v_min", "v_max", "pause_time"):
            if k in mob:
                kwargs[k] = mob[k]
        unknown = set(mob) - {"v_min", "v_max", "pause_time"}
        if unknown:
            raise ConfigError(f"unknown mobility keys: {sorted(unknown)}")
    if "flows" in raw:
        flows = raw.pop("flows")
        if flows is not None:
            try:
                kwargs["flows"] = tuple(Flow(**f) for f in flows)
            except TypeError as exc:
                raise ConfigError(str(exc)) from None
    valid = set(ScenarioConfig.__dataclass_fields__)
    unknown = set(raw) - valid
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs.update(raw)
    kwargs.update(overrides)
    try:
        return PRESETS[preset](**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
