"""Random-waypoint trajectories and linear kinematic extrapolation.

Each node moves in straight legs: pick a uniform destination in the field,
travel at a uniform speed from [v_min, v_max], optionally pause, repeat.
Every node owns an independent seeded RNG stream derived from the scenario
seed, so adding node N+1 to a scenario never perturbs nodes 0..N.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, TextIO

from .geometry import TimeSeconds, Vec2


@dataclass(frozen=True)
class MobilityConfig:
    area_width: float
    area_height: float
    v_min: float
    v_max: float
    pause_time: float = 0.0
    rng_seed: int = 1

    def __post_init__(self):
        if self.area_width <= 0 or self.area_height <= 0:
            raise ValueError("field dimensions must be positive")
        if not (0 < self.v_min <= self.v_max):
            raise ValueError(f"need 0 < v_min <= v_max, got [{self.v_min}, {self.v_max}]")
        if self.pause_time < 0:
            raise ValueError("pause_time must be >= 0")

    def contains(self, p: Vec2) -> bool:
        return 0.0 <= p[0] <= self.area_width and 0.0 <= p[1] <= self.area_height


@dataclass(frozen=True)
class WaypointLeg:
    """One straight movement segment, departing `depart_time` at `speed`."""

    start: Vec2
    end: Vec2
    speed: float
    depart_time: TimeSeconds

    @property
    def travel_time(self) -> float:
        dx = self.end[0] - self.start[0]
        dy = self.end[1] - self.start[1]
        return (dx * dx + dy * dy) ** 0.5 / self.speed

    @property
    def arrive_time(self) -> TimeSeconds:
        return self.depart_time + self.travel_time


def next_leg(current: Vec2, cfg: MobilityConfig, rng: random.Random,
             depart_time: TimeSeconds = 0.0) -> WaypointLeg:
    """Sample the next waypoint leg from `current`.

    Destination is uniform over the field, speed uniform over
    [v_min, v_max]; fully determined by the state of `rng`.
    """
    if not cfg.contains(current):
        raise ValueError(f"current position {current} outside the {cfg.area_width}x{cfg.area_height} field")
    end = Vec2(rng.uniform(0.0, cfg.area_width), rng.uniform(0.0, cfg.area_height))
    speed = rng.uniform(cfg.v_min, cfg.v_max)
    return WaypointLeg(start=current, end=end, speed=speed, depart_time=depart_time)


def position_at(leg: WaypointLeg, t: TimeSeconds) -> Vec2:
    """Position on the leg at time t; clamps to the endpoint after arrival."""
    if t < leg.depart_time:
        raise ValueError(f"t={t} precedes leg departure at {leg.depart_time}")
    travel = leg.travel_time
    elapsed = t - leg.depart_time
    if elapsed >= travel:
        return leg.end
    frac = elapsed / travel
    return Vec2(leg.start[0] + (leg.end[0] - leg.start[0]) * frac,
                leg.start[1] + (leg.end[1] - leg.start[1]) * frac)


def velocity_at(leg: WaypointLeg, t: TimeSeconds) -> Vec2:
    """Velocity on the leg at time t; zero once the endpoint is reached."""
    if t < leg.depart_time:
        raise ValueError(f"t={t} precedes leg departure at {leg.depart_time}")
    travel = leg.travel_time
    if t - leg.depart_time >= travel:
        return Vec2(0.0, 0.0)
    inv = 1.0 / travel
    return Vec2((leg.end[0] - leg.start[0]) * inv, (leg.end[1] - leg.start[1]) * inv)


def extrapolate(pos: Vec2, vel: Vec2, dt: float) -> Vec2:
    """Straight-line position estimate pos + vel*dt.

    Deliberately ignores field boundaries and future waypoint changes: this
    is the receiver-side prediction primitive, which only knows the sampled
    kinematics.
    """
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt}")
    return Vec2(pos[0] + vel[0] * dt, pos[1] + vel[1] * dt)


class MobilityStream:
    """Seeded random-waypoint source for one node.

    Draw order is fixed (initial position, then per leg: end x, end y,
    speed), which keeps offline trajectory generation and the live engine
    bit-identical for the same seed.
    """

    def __init__(self, cfg: MobilityConfig, node_id: int):
        self.cfg = cfg
        self._rng = random.Random(f"{cfg.rng_seed}/mobility/{node_id}")

    def initial_position(self) -> Vec2:
        return Vec2(self._rng.uniform(0.0, self.cfg.area_width),
                    self._rng.uniform(0.0, self.cfg.area_height))

    def next_leg(self, current: Vec2, depart_time: TimeSeconds) -> WaypointLeg:
        return next_leg(current, self.cfg, self._rng, depart_time)


def generate_legs(cfg: MobilityConfig, node_id: int, horizon: TimeSeconds) -> list[WaypointLeg]:
    """All legs of one node's trajectory whose departure precedes `horizon`."""
    stream = MobilityStream(cfg, node_id)
    pos = stream.initial_position()
    legs = []
    t = 0.0
    while t < horizon:
        leg = stream.next_leg(pos, t)
        legs.append(leg)
        pos = leg.end
        t = leg.arrive_time + cfg.pause_time
        if leg.travel_time == 0.0 and cfg.pause_time == 0.0:
            # zero-length leg with no pause: loop again at the same instant
            continue
    return legs


def write_leg_log(legs_by_node: dict[int, Iterable[WaypointLeg]], out: TextIO) -> None:
    """Dump waypoint legs as CSV for debugging and offline analysis."""
    out.write("node_id,depart_time,start_x,start_y,end_x,end_y,speed\n")
    for node_id in sorted(legs_by_node):
        for leg in legs_by_node[node_id]:
            out.write(f"{node_id},{leg.depart_time!r},{leg.start.x!r},{leg.start.y!r},"
                      f"{leg.end.x!r},{leg.end.y!r},{leg.speed!r}\n")
