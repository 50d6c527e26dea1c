"""Per-node AODV state machine with the mobility-prediction extensions.

One `AodvNode` instance per simulated node. Nodes never touch each other's
state: everything flows through the engine services object (broadcast,
unicast, timers, kinematics sampling, metric counters), which also makes
the node directly drivable by unit tests with a fake services object.

The three predictive variants differ from the baseline in two places only:
the destination collects route-request candidates for a short window and
picks one by hop count / expiration rules instead of answering the first
copy, and the hello period adapts to the predicted lifetime of the most
fragile neighbor link instead of staying fixed.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .geometry import NodeId, TimeSeconds, Vec2
from .messages import Data, Hello, ProtocolVariant, Rerr, Rrep, Rreq
from .prediction import (UNBOUNDED, RelativeState, adaptive_hello_interval,
                         predict_link_duration, tighten_expiration)


@dataclass
class ProtocolConfig:
    """Tunable protocol constants, shared by every node of a scenario."""

    collection_window: float = 0.015      # destination-side candidate window (s)
    hello_divisor: float = 2.0            # min neighbor LDT / divisor -> hello period
    hello_interval_floor: float = 1.0
    hello_interval_cap: float = 10.0
    baseline_hello_interval: float = 1.0
    hello_loss_allowance: float = 2.0     # missed hellos before a neighbor is declared gone
    route_lifetime_cap: float = 100.0     # clamp for unbounded expirations
    baseline_route_lifetime: float = 10.0
    reverse_route_lifetime: float = 3.0
    rreq_retries: int = 2                 # extra floods after the first one
    rreq_retry_timeout: float = 0.15      # covers window + flood round trip; doubles per retry
    active_traffic_window: float = 1.0    # how recently a source must have sent to
                                          # re-discover on an error report
    data_queue_limit: int = 64            # per-destination origin queue
    data_hop_limit: int = 64
    rreq_bytes: int = 48
    rrep_bytes: int = 36
    rerr_bytes: int = 20
    hello_bytes: int = 32

    def __post_init__(self):
        if self.collection_window <= 0:
            raise ValueError("collection_window must be positive")
        if self.hello_divisor <= 0:
            raise ValueError("hello_divisor must be positive")


@dataclass(slots=True)
class RoutingTableEntry:
    destination: NodeId
    next_hop: NodeId
    hop_count: int
    dest_seq: int
    expiry_time: TimeSeconds
    valid: bool
    lifetime: float           # refresh amount when the route carries traffic
    fixed_expiry: bool = False   # prediction-derived lifetime: never extended by use


@dataclass(slots=True)
class NeighborEntry:
    neighbor: NodeId
    last_heard: TimeSeconds
    ldt: float
    interval: float           # sender-announced hello period, drives the liveness deadline


class RouteCandidate(NamedTuple):
    """One collected discovery copy at the destination."""

    next_hop: NodeId
    hop_count: int
    ret: float


@dataclass(slots=True)
class RreqCollectionBuffer:
    origin: NodeId
    broadcast_id: int
    origin_seq: int
    deadline: TimeSeconds
    candidates: list[RouteCandidate] = field(default_factory=list)


_DRAINED = object()   # replaces a buffer after its one-shot drain


@dataclass(slots=True)
class PendingDiscovery:
    queue: deque        # Data packets waiting for a route
    retries_used: int = 0
    serial: int = 0     # identifies the flood a retry timer belongs to


def select_route(variant: ProtocolVariant, candidates: Sequence[RouteCandidate]) -> int:
    """Index of the winning candidate under the given variant's rule.

    AMP1 keeps only the fewest-hop candidates and picks the longest-lived;
    AMP2 picks the longest-lived outright; AMP3 maximizes lifetime per hop.
    Exact ties break toward the lowest next-hop id for reproducibility.
    """
    if not candidates:
        raise ValueError("no candidates to select from")
    if variant is ProtocolVariant.AODV:
        raise ValueError("baseline AODV answers the first request; nothing to select")

    if variant is ProtocolVariant.AMP1:
        eligible_hops = min(c.hop_count for c in candidates)
    else:
        eligible_hops = None

    best = None
    best_key = None
    for i, c in enumerate(candidates):
        if eligible_hops is not None and c.hop_count != eligible_hops:
            continue
        metric = c.ret / c.hop_count if variant is ProtocolVariant.AMP3 else c.ret
        key = (metric, -c.next_hop)
        if best is None or key > best_key:
            best, best_key = i, key
    return best


class AodvNode:
    """Routing state machine for a single node."""

    __slots__ = ("nid", "variant", "pcfg", "sim", "rng", "seq", "bid",
                 "routes", "neighbors", "seen_rreq", "buffers", "pending",
                 "last_sent", "hello_interval", "hello_epoch", "next_hello_at",
                 "next_neighbor_check")

    def __init__(self, nid: NodeId, variant: ProtocolVariant,
                 pcfg: ProtocolConfig, sim, rng: random.Random):
        self.nid = nid
        self.variant = variant
        self.pcfg = pcfg
        self.sim = sim
        self.rng = rng
        self.seq = 0
        self.bid = 0
        self.routes: dict[NodeId, RoutingTableEntry] = {}
        self.neighbors: dict[NodeId, NeighborEntry] = {}
        self.seen_rreq: set[tuple[NodeId, int]] = set()
        self.buffers: dict[tuple[NodeId, int], object] = {}
        self.pending: dict[NodeId, PendingDiscovery] = {}
        self.last_sent: dict[NodeId, TimeSeconds] = {}
        self.hello_interval = (pcfg.hello_interval_cap if variant.predictive
                               else pcfg.baseline_hello_interval)
        self.hello_epoch = 0
        self.next_hello_at = 0.0
        self.next_neighbor_check = UNBOUNDED

    # -- lifecycle ---------------------------------------------------------

    def start(self, now: TimeSeconds) -> None:
        # Stagger first hellos so nodes don't broadcast in lockstep.
        first = now + self.rng.uniform(0.0, self.hello_interval)
        self.next_hello_at = first
        self.sim.schedule_timer(self.nid, first, ("hello", self.hello_epoch))

    # -- application entry points --------------------------------------------

    def app_send(self, destination: NodeId, payload_bytes: int, now: TimeSeconds) -> None:
        pkt = Data(origin=self.nid, destination=destination,
                   payload_bytes=payload_bytes, created_at=now, sender=self.nid)
        self._route_data(pkt, now)

    # -- message dispatch ------------------------------------------------------

    def on_message(self, msg, now: TimeSeconds) -> None:
        kind = type(msg)
        if kind is Hello:
            self._handle_hello(msg, now)
        elif kind is Data:
            self._route_data(msg, now)
        elif kind is Rreq:
            self._handle_rreq(msg, now)
        elif kind is Rrep:
            self._handle_rrep(msg, now)
        elif kind is Rerr:
            self._handle_rerr(msg, now)
        else:
            raise TypeError(f"unknown message type {kind!r}")

    def on_timer(self, key, now: TimeSeconds) -> None:
        tag = key[0]
        if tag == "hello":
            self._fire_hello(key[1], now)
        elif tag == "collect":
            self._drain_collection(key[1], now)
        elif tag == "retry":
            self._fire_retry(key[1], key[2], now)
        elif tag == "nbrcheck":
            self._check_neighbors(now)
        elif tag == "rexpire":
            self._fire_route_expiry(key[1], now)
        else:
            raise ValueError(f"unknown timer {key!r}")

    def on_send_failure(self, to: NodeId, msg, now: TimeSeconds) -> None:
        """Unicast transmission failed: the neighbor has left radio range."""
        if type(msg) is Data:
            self.sim.drop_data(msg, "link_failure")
        self.handle_link_failure(to, now)

    # -- hello / neighbor maintenance ------------------------------------------

    def _fire_hello(self, epoch: int, now: TimeSeconds) -> None:
        if epoch != self.hello_epoch:
            return   # superseded by an early reschedule
        pos, vel = self.sim.kinematics(self.nid)
        interval = self.hello_interval
        self.sim.broadcast(self.nid, Hello(sender=self.nid, sender_pos=pos,
                                           sender_vel=vel, interval=interval))
        self.next_hello_at = now + interval
        self.sim.schedule_timer(self.nid, self.next_hello_at, ("hello", epoch))

    def _handle_hello(self, msg: Hello, now: TimeSeconds) -> None:
        self._note_neighbor(msg.sender, msg.sender_pos, msg.sender_vel, now,
                            announced_interval=msg.interval)

    def _note_neighbor(self, sender: NodeId, pos: Vec2, vel: Vec2,
                       now: TimeSeconds, announced_interval: float | None = None) -> float:
        """Refresh the neighbor table from piggybacked kinematics; returns the link duration."""
        my_pos, my_vel = self.sim.kinematics(self.nid)
        rng_m = self.sim.radio_range
        px, py = pos[0] - my_pos[0], pos[1] - my_pos[1]
        if px * px + py * py > rng_m * rng_m:
            # The sender moved past the range boundary while the frame was in
            # flight; the link is as good as gone.
            ldt = 0.0
        else:
            ldt = predict_link_duration(
                RelativeState(Vec2(px, py), Vec2(vel[0] - my_vel[0], vel[1] - my_vel[1])),
                rng_m)
        entry = self.neighbors.get(sender)
        if entry is None:
            if announced_interval is None:
                # Heard via a flood before any hello: assume the slowest cadence.
                announced_interval = (self.pcfg.hello_interval_cap if self.variant.predictive
                                      else self.pcfg.baseline_hello_interval)
            entry = NeighborEntry(sender, now, ldt, announced_interval)
            self.neighbors[sender] = entry
        else:
            entry.last_heard = now
            entry.ldt = ldt
            if announced_interval is not None:
                entry.interval = announced_interval
        if self.variant.predictive:
            self._recompute_hello_interval(now)
        deadline = entry.last_heard + self.pcfg.hello_loss_allowance * entry.interval
        if deadline < self.next_neighbor_check:
            self.next_neighbor_check = deadline
            self.sim.schedule_timer(self.nid, deadline, ("nbrcheck",))
        return ldt

    def _recompute_hello_interval(self, now: TimeSeconds) -> None:
        weakest = UNBOUNDED
        for e in self.neighbors.values():
            if e.ldt < weakest:
                weakest = e.ldt
        new = adaptive_hello_interval(weakest, self.pcfg.hello_divisor,
                                      self.pcfg.hello_interval_floor,
                                      self.pcfg.hello_interval_cap)
        if new == self.hello_interval:
            return
        self.hello_interval = new
        if now + new < self.next_hello_at:
            # The neighborhood got more fragile: pull the next hello forward.
            # Growth never postpones an announced hello, so receivers' loss
            # deadlines stay conservative.
            self.hello_epoch += 1
            self.next_hello_at = now + new
            self.sim.schedule_timer(self.nid, self.next_hello_at,
                                    ("hello", self.hello_epoch))

    def _check_neighbors(self, now: TimeSeconds) -> None:
        self.next_neighbor_check = UNBOUNDED
        allowance = self.pcfg.hello_loss_allowance
        stale = []
        earliest = UNBOUNDED
        for nid, e in self.neighbors.items():
            deadline = e.last_heard + allowance * e.interval
            if deadline <= now:
                stale.append(nid)
            elif deadline < earliest:
                earliest = deadline
        for nid in sorted(stale):
            self.handle_link_failure(nid, now)
        if earliest < UNBOUNDED:
            self.next_neighbor_check = earliest
            self.sim.schedule_timer(self.nid, earliest, ("nbrcheck",))

    def handle_link_failure(self, lost: NodeId, now: TimeSeconds) -> None:
        """A neighbor vanished: invalidate its routes and warn the upstream."""
        if self.neighbors.pop(lost, None) is not None and self.variant.predictive:
            self._recompute_hello_interval(now)
        unreachable = []
        for dest, entry in self.routes.items():
            if entry.valid and entry.next_hop == lost:
                entry.dest_seq += 1
                entry.valid = False
                unreachable.append((dest, entry.dest_seq))
        if unreachable:
            unreachable.sort()
            self.sim.broadcast(self.nid, Rerr(tuple(unreachable), sender=self.nid))
            self._rediscover_if_active([d for d, _ in unreachable], now)

    # -- route discovery ---------------------------------------------------------

    def originate_discovery(self, destination: NodeId, now: TimeSeconds) -> None:
        if self._lookup_route(destination, now) is not None:
            raise ValueError(f"node {self.nid} already has a live route to {destination}")
        self.seq += 1
        self.bid += 1
        self.seen_rreq.add((self.nid, self.bid))
        known = self.routes.get(destination)
        pos, vel = self.sim.kinematics(self.nid)
        self.sim.broadcast(self.nid, Rreq(
            origin=self.nid, origin_seq=self.seq, broadcast_id=self.bid,
            destination=destination, dest_seq=known.dest_seq if known else 0,
            hop_count=1, ret=UNBOUNDED, sender=self.nid,
            sender_pos=pos, sender_vel=vel))

    def _handle_rreq(self, msg: Rreq, now: TimeSeconds) -> None:
        if msg.origin == self.nid:
            self.sim.count("rreq_own_copy")
            return
        ldt = self._note_neighbor(msg.sender, msg.sender_pos, msg.sender_vel, now)
        key = (msg.origin, msg.broadcast_id)

        if msg.destination == self.nid and self.variant.predictive:
            # Every copy of the flood that reaches the destination inside the
            # window is a distinct route candidate, so duplicate suppression
            # does not apply here.
            buf = self.buffers.get(key)
            if buf is _DRAINED:
                self.sim.count("rreq_after_window")
                return
            folded = tighten_expiration(msg.ret, ldt)
            if buf is None:
                buf = RreqCollectionBuffer(origin=msg.origin, broadcast_id=msg.broadcast_id,
                                           origin_seq=msg.origin_seq,
                                           deadline=now + self.pcfg.collection_window)
                self.buffers[key] = buf
                self.sim.schedule_timer(self.nid, buf.deadline, ("collect", key))
            buf.candidates.append(RouteCandidate(msg.sender, msg.hop_count, folded))
            return

        if key in self.seen_rreq:
            self.sim.count("rreq_duplicate")
            return
        self.seen_rreq.add(key)

        folded = tighten_expiration(msg.ret, ldt)
        self._consider_route(msg.origin, msg.sender, msg.hop_count, msg.origin_seq,
                             self.pcfg.reverse_route_lifetime, now)

        if msg.destination == self.nid:
            # Baseline destination: answer the first copy on the spot.
            self.seq += 1
            self.sim.unicast(self.nid, msg.sender, Rrep(
                destination=self.nid, dest_seq=self.seq, origin=msg.origin,
                hop_count=0, lifetime=self.pcfg.baseline_route_lifetime,
                sender=self.nid))
            return

        if not self.variant.predictive:
            cached = self._lookup_route(msg.destination, now)
            if cached is not None and cached.dest_seq >= msg.dest_seq:
                # Classic intermediate reply from a fresh-enough cached route.
                self.sim.unicast(self.nid, msg.sender, Rrep(
                    destination=msg.destination, dest_seq=cached.dest_seq,
                    origin=msg.origin, hop_count=cached.hop_count,
                    lifetime=cached.expiry_time - now, sender=self.nid))
                return

        pos, vel = self.sim.kinematics(self.nid)
        self.sim.broadcast(self.nid, Rreq(
            origin=msg.origin, origin_seq=msg.origin_seq, broadcast_id=msg.broadcast_id,
            destination=msg.destination, dest_seq=msg.dest_seq,
            hop_count=msg.hop_count + 1, ret=folded, sender=self.nid,
            sender_pos=pos, sender_vel=vel))

    def _drain_collection(self, key: tuple[NodeId, int], now: TimeSeconds) -> None:
        buf = self.buffers.get(key)
        if buf is _DRAINED or buf is None:
            return
        self.buffers[key] = _DRAINED
        chosen = buf.candidates[select_route(self.variant, buf.candidates)]
        self._consider_route(buf.origin, chosen.next_hop, chosen.hop_count,
                             buf.origin_seq, self.pcfg.reverse_route_lifetime, now)
        self.seq += 1
        lifetime = min(chosen.ret, self.pcfg.route_lifetime_cap)
        self.sim.unicast(self.nid, chosen.next_hop, Rrep(
            destination=self.nid, dest_seq=self.seq, origin=buf.origin,
            hop_count=0, lifetime=lifetime, sender=self.nid))

    def _handle_rrep(self, msg: Rrep, now: TimeSeconds) -> None:
        hops_here = msg.hop_count + 1
        accepted = self._consider_route(msg.destination, msg.sender, hops_here,
                                        msg.dest_seq, msg.lifetime, now,
                                        fixed_expiry=self.variant.predictive)
        if not accepted:
            self.sim.count("rrep_stale")
            return
        if self.variant.predictive:
            # The route retires at its predicted break; arrange to replace it
            # on time if we are still sourcing traffic then.
            self.sim.schedule_timer(self.nid, now + msg.lifetime,
                                    ("rexpire", msg.destination))
        if msg.origin == self.nid:
            return   # discovery complete; queued traffic already flushed on install
        reverse = self._lookup_route(msg.origin, now)
        if reverse is None:
            self.sim.count("rrep_no_reverse_route")
            return
        self.sim.unicast(self.nid, reverse.next_hop, Rrep(
            destination=msg.destination, dest_seq=msg.dest_seq, origin=msg.origin,
            hop_count=hops_here, lifetime=msg.lifetime, sender=self.nid))

    def _fire_retry(self, destination: NodeId, serial: int, now: TimeSeconds) -> None:
        waiting = self.pending.get(destination)
        if waiting is None or waiting.serial != serial:
            return
        if self._lookup_route(destination, now) is not None:
            # A route appeared through some other exchange; flush and stop.
            del self.pending[destination]
            for pkt in waiting.queue:
                self._route_data(pkt, now)
            return
        if waiting.retries_used < self.pcfg.rreq_retries:
            waiting.retries_used += 1
            self.sim.count("rreq_retry")
            self.originate_discovery(destination, now)
            waiting.serial = self.bid
            backoff = self.pcfg.rreq_retry_timeout * (2.0 ** waiting.retries_used)
            self.sim.schedule_timer(self.nid, now + backoff,
                                    ("retry", destination, waiting.serial))
        else:
            del self.pending[destination]
            self.sim.count("discovery_failed")
            for pkt in waiting.queue:
                self.sim.drop_data(pkt, "no_route")

    # -- error propagation ---------------------------------------------------------

    def _handle_rerr(self, msg: Rerr, now: TimeSeconds) -> None:
        cascaded = []
        for dest, bad_seq in msg.unreachable:
            entry = self.routes.get(dest)
            if entry is not None and entry.valid and entry.next_hop == msg.sender:
                entry.dest_seq = max(entry.dest_seq, bad_seq)
                entry.valid = False
                cascaded.append((dest, entry.dest_seq))
        if cascaded:
            cascaded.sort()
            self.sim.broadcast(self.nid, Rerr(tuple(cascaded), sender=self.nid))
            self._rediscover_if_active([d for d, _ in cascaded], now)

    def _fire_route_expiry(self, dest: NodeId, now: TimeSeconds) -> None:
        entry = self.routes.get(dest)
        if entry is None or not entry.valid or entry.expiry_time > now:
            return   # replaced or superseded since this check was scheduled
        entry.valid = False
        self._rediscover_if_active([dest], now)

    def _rediscover_if_active(self, dests, now: TimeSeconds) -> None:
        """Re-flood right away for lost routes this node was recently sourcing.

        Starting discovery at error-report time instead of on the next data
        packet lets the flood complete inside the inter-packet gap.
        """
        window = self.pcfg.active_traffic_window
        for dest in dests:
            if (dest not in self.pending
                    and now - self.last_sent.get(dest, -UNBOUNDED) <= window
                    and self._lookup_route(dest, now) is None):
                waiting = PendingDiscovery(queue=deque())
                self.pending[dest] = waiting
                self.originate_discovery(dest, now)
                waiting.serial = self.bid
                self.sim.schedule_timer(self.nid, now + self.pcfg.rreq_retry_timeout,
                                        ("retry", dest, waiting.serial))

    # -- data plane -------------------------------------------------------------------

    def _route_data(self, pkt: Data, now: TimeSeconds) -> None:
        if pkt.destination == self.nid:
            self.sim.data_delivered(pkt, now)
            return
        if pkt.origin == self.nid:
            self.last_sent[pkt.destination] = now
        if pkt.hops_walked >= self.pcfg.data_hop_limit:
            self.sim.count("data_hop_limit")
            self.sim.drop_data(pkt, "no_route")
            return
        entry = self._lookup_route(pkt.destination, now)
        if entry is not None:
            if not entry.fixed_expiry:
                entry.expiry_time = max(entry.expiry_time, now + entry.lifetime)
            pkt.sender = self.nid
            pkt.hops_walked += 1
            self.sim.unicast(self.nid, entry.next_hop, pkt)
            return
        if pkt.origin == self.nid:
            self._queue_and_discover(pkt, now)
        else:
            # Relay lost its route: drop and tell the upstream.
            self.sim.drop_data(pkt, "no_route")
            stale = self.routes.get(pkt.destination)
            seq = stale.dest_seq + 1 if stale is not None else 1
            if stale is not None:
                stale.dest_seq = seq
                stale.valid = False
            self.sim.broadcast(self.nid, Rerr(((pkt.destination, seq),), sender=self.nid))

    def _queue_and_discover(self, pkt: Data, now: TimeSeconds) -> None:
        waiting = self.pending.get(pkt.destination)
        if waiting is None:
            waiting = PendingDiscovery(queue=deque())
            self.pending[pkt.destination] = waiting
            self.originate_discovery(pkt.destination, now)
            waiting.serial = self.bid
            self.sim.schedule_timer(self.nid, now + self.pcfg.rreq_retry_timeout,
                                    ("retry", pkt.destination, waiting.serial))
        if len(waiting.queue) >= self.pcfg.data_queue_limit:
            oldest = waiting.queue.popleft()
            self.sim.drop_data(oldest, "queue_overflow")
        waiting.queue.append(pkt)

    # -- routing table --------------------------------------------------------------------

    def _consider_route(self, dest: NodeId, next_hop: NodeId, hop_count: int,
                        seq: int, lifetime: float, now: TimeSeconds,
                        fixed_expiry: bool = False) -> bool:
        """Install a route unless the table already holds strictly fresher news."""
        if lifetime <= 0:
            return False   # dead on arrival (a link predicted to break right now)
        entry = self.routes.get(dest)
        if entry is not None:
            fresher = (seq > entry.dest_seq
                       or (seq == entry.dest_seq
                           and (not entry.valid or entry.expiry_time <= now
                                or hop_count < entry.hop_count)))
            if not fresher:
                return False
        self.routes[dest] = RoutingTableEntry(
            destination=dest, next_hop=next_hop, hop_count=hop_count,
            dest_seq=seq, expiry_time=now + lifetime, valid=True, lifetime=lifetime,
            fixed_expiry=fixed_expiry)
        waiting = self.pending.pop(dest, None)
        if waiting is not None:
            for pkt in waiting.queue:
                self._route_data(pkt, now)
        return True

    def _lookup_route(self, dest: NodeId, now: TimeSeconds) -> RoutingTableEntry | None:
        entry = self.routes.get(dest)
        if entry is None or not entry.valid:
            return None
        if entry.expiry_time <= now:
            entry.valid = False
            return None
        return entry

    def route_expiry_sweep(self, now: TimeSeconds) -> list[NodeId]:
        """Invalidate every entry whose lifetime has run out; returns their destinations."""
        expired = []
        for dest, entry in self.routes.items():
            if entry.valid and entry.expiry_time <= now:
                entry.valid = False
                expired.append(dest)
        return expired
