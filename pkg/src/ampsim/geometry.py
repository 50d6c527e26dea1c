"""Planar geometry primitives shared by the mobility, prediction and radio code.

All coordinates are meters in a flat 2-D field; node identifiers are plain
ints assigned densely from 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

NodeId = int
TimeSeconds = float


class Vec2(NamedTuple):
    """A 2-D point or velocity vector, in meters / meters-per-second."""

    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return Vec2(self.x - other.x, self.y - other.y)

    def scaled(self, c: float) -> "Vec2":
        return Vec2(self.x * c, self.y * c)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


def distance(p: Vec2, q: Vec2) -> float:
    """Euclidean distance between two points."""
    return math.hypot(p[0] - q[0], p[1] - q[1])


def is_connected(p: Vec2, q: Vec2, radio_range: float) -> bool:
    """True when two nodes are within radio range of each other.

    The boundary counts as connected: a pair at exactly `radio_range` can
    still exchange packets.
    """
    if radio_range <= 0:
        raise ValueError(f"radio range must be positive, got {radio_range}")
    return distance(p, q) <= radio_range


class Link(NamedTuple):
    """An undirected node pair, stored in canonical (low, high) order."""

    a: NodeId
    b: NodeId

    @staticmethod
    def of(i: NodeId, j: NodeId) -> "Link":
        if i == j:
            raise ValueError(f"a link needs two distinct endpoints, got {i}")
        return Link(i, j) if i < j else Link(j, i)


@dataclass(frozen=True)
class Route:
    """An ordered, loop-free node sequence from source to destination."""

    hops: tuple[NodeId, ...]

    def __post_init__(self):
        if len(self.hops) < 2:
            raise ValueError("a route needs at least a source and a destination")
        if len(set(self.hops)) != len(self.hops):
            raise ValueError(f"route revisits a node: {self.hops}")

    @property
    def source(self) -> NodeId:
        return self.hops[0]

    @property
    def destination(self) -> NodeId:
        return self.hops[-1]

    @property
    def hop_count(self) -> int:
        return len(self.hops) - 1

    def links(self) -> list[Link]:
        return [Link.of(u, v) for u, v in zip(self.hops, self.hops[1:])]
