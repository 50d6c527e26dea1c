"""Control and data message types exchanged between nodes.

Broadcast control messages piggyback the sender's sampled position and
velocity so that receivers can form the relative state needed for link
duration prediction. Field layouts are simulator-level; only per-kind
transmission counts (and nominal header sizes) feed the overhead metrics.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .geometry import NodeId, TimeSeconds, Vec2


class ProtocolVariant(enum.Enum):
    """Routing flavor: classic AODV or one of the prediction-based selectors."""

    AODV = "aodv"    # first-arriving request wins, fixed 1 s hellos
    AMP1 = "amp1"    # longest expiration among the fewest-hop candidates
    AMP2 = "amp2"    # longest expiration overall
    AMP3 = "amp3"    # largest expiration-to-hops ratio

    @property
    def predictive(self) -> bool:
        return self is not ProtocolVariant.AODV


@dataclass(slots=True)
class Rreq:
    origin: NodeId
    origin_seq: int
    broadcast_id: int
    destination: NodeId
    dest_seq: int
    hop_count: int            # hops from origin to the receiver of this copy
    ret: float                # min link duration folded over the path so far
    sender: NodeId
    sender_pos: Vec2
    sender_vel: Vec2


@dataclass(slots=True)
class Rrep:
    destination: NodeId
    dest_seq: int
    origin: NodeId
    hop_count: int            # hops from the sender of this copy to destination
    lifetime: float
    sender: NodeId


@dataclass(slots=True)
class Rerr:
    unreachable: tuple[tuple[NodeId, int], ...]   # (destination, bumped seq) pairs
    sender: NodeId


@dataclass(slots=True)
class Hello:
    sender: NodeId
    sender_pos: Vec2
    sender_vel: Vec2
    interval: float           # sender's current hello period, for liveness deadlines


@dataclass(slots=True)
class Data:
    origin: NodeId
    destination: NodeId
    payload_bytes: int
    created_at: TimeSeconds
    sender: NodeId
    hops_walked: int = 0


ControlMessage = Rreq | Rrep | Rerr | Hello | Data
