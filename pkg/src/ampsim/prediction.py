"""Link-duration prediction and the timers derived from it.

A receiver that knows the relative position p and relative velocity v of a
currently-connected neighbor can predict how long the pair stays within
radio range r: the predicted separation |p + v*dt| is a quadratic in dt
with positive leading coefficient, so the pair leaves the range disk at the
largest root of |p + v*dt|^2 = r^2. That exit time is the link duration.
A route expires when its most fragile link does, so route expiration is the
minimum link duration along the path, folded hop by hop into the discovery
message.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple

from .geometry import Vec2

# Distinguished "never expires" duration: a pair at relative rest stays
# connected forever under straight-line prediction. Consumers must clamp
# before feeding this into timer arithmetic.
UNBOUNDED = math.inf


def is_unbounded(duration: float) -> bool:
    return duration == UNBOUNDED


class RelativeState(NamedTuple):
    """Kinematics of node i as seen from node j: positions and velocities subtracted."""

    rel_pos: Vec2
    rel_vel: Vec2

    @staticmethod
    def between(pos_i: Vec2, vel_i: Vec2, pos_j: Vec2, vel_j: Vec2) -> "RelativeState":
        return RelativeState(Vec2(pos_i[0] - pos_j[0], pos_i[1] - pos_j[1]),
                             Vec2(vel_i[0] - vel_j[0], vel_i[1] - vel_j[1]))


def predict_link_duration(rel: RelativeState, radio_range: float) -> float:
    """Seconds until a currently-connected pair leaves radio range.

    Returns UNBOUNDED at zero relative velocity. Raises ValueError when the
    pair is already out of range: callers only invoke this on reception of
    a message from a neighbor, so a disconnected pair is a protocol bug.
    """
    if radio_range <= 0:
        raise ValueError(f"radio range must be positive, got {radio_range}")
    px, py = rel.rel_pos
    vx, vy = rel.rel_vel
    d2 = px * px + py * py
    r2 = radio_range * radio_range
    if d2 > r2:
        raise ValueError(f"pair currently disconnected: |p|={math.sqrt(d2):.3f} > r={radio_range}")
    v2 = vx * vx + vy * vy
    if v2 == 0.0:
        return UNBOUNDED
    pv = px * vx + py * vy
    # d2 <= r2 makes the discriminant non-negative; clamp rounding dips.
    disc = pv * pv - v2 * (d2 - r2)
    root = math.sqrt(disc) if disc > 0.0 else 0.0
    dt = (-pv + root) / v2
    return dt if dt > 0.0 else 0.0


def route_expiration(link_durations: Iterable[float]) -> float:
    """Expiration of a whole route: the least of its link durations."""
    durations = list(link_durations)
    if not durations:
        raise ValueError("a route has at least one link")
    return min(durations)


def tighten_expiration(current_ret: float, new_ldt: float) -> float:
    """Fold one more link duration into an in-flight expiration value.

    Discovery messages start the expiration field at UNBOUNDED; every hop
    folds in the duration of the link it just crossed. Left-folding this
    over a path equals route_expiration of the same durations.
    """
    return new_ldt if new_ldt < current_ret else current_ret


def adaptive_hello_interval(min_neighbor_ldt: float, divisor: float,
                            floor: float = 1.0, cap: float = 10.0) -> float:
    """Hello period for a node whose most fragile neighbor lasts `min_neighbor_ldt`.

    Stable neighborhoods earn long hello periods (up to `cap`), fragile ones
    fall back toward the classic 1-second floor. `divisor` controls how many
    hello exchanges fit into a predicted link lifetime.
    """
    if divisor <= 0:
        raise ValueError(f"divisor must be positive, got {divisor}")
    return min(cap, max(floor, min_neighbor_ldt / divisor))
