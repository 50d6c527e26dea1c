"""Deterministic discrete-event core: clock, queue, unit-disk radio, traffic.

Events are processed in (fire_time, insertion_sequence) order, which is a
total order independent of wall time, hashing, or host load. All randomness
comes from named streams derived from the scenario seed, so identical
configs replay identically, event for event.

The radio is a unit disk: a transmission started at time t reaches exactly
the nodes within range at t, one per-hop latency later. Each node owns one
transmit queue serialized at one packet per latency slot, which is the only
congestion mechanism modeled.
"""

from __future__ import annotations

import heapq
import random
from typing import Callable

from .config import Flow, ScenarioConfig
from .geometry import NodeId, TimeSeconds, Vec2
from .messages import Data, Hello, Rerr, Rrep, Rreq
from .metrics import MetricsReport, RawCounters, compute_metrics
from .mobility import MobilityStream
from .protocol import AodvNode

# Event kinds; heap entries are (fire_time, seq, kind, a, b).
EV_DELIVER = 0     # a = receiving node, b = message
EV_TIMER = 1       # a = node, b = timer key
EV_APP = 2         # a = flow index
EV_ARRIVE = 3      # a = node reaching its waypoint
EV_SAMPLE = 4
EV_SEND_FAIL = 5   # a = sending node, b = (intended receiver, message)

_KIND_NAMES = {EV_DELIVER: "deliver", EV_TIMER: "timer", EV_APP: "app_generate",
               EV_ARRIVE: "waypoint_arrival", EV_SAMPLE: "metrics_sample",
               EV_SEND_FAIL: "send_failure"}


class SimulationError(RuntimeError):
    pass


class Simulator:
    """One scenario instance. Strictly single-threaded; share nothing, run many."""

    def __init__(self, cfg: ScenarioConfig,
                 on_transmit: Callable[[TimeSeconds, NodeId, object], None] | None = None,
                 trace: Callable[[str], None] | None = None):
        self.cfg = cfg
        self.radio_range = cfg.radio.range
        self.latency = cfg.radio.per_hop_latency
        self.loss = cfg.radio.loss_probability
        self.now: TimeSeconds = 0.0
        self.counters = RawCounters()
        self.on_transmit = on_transmit
        self.trace = trace
        self.samples: list[dict] = []

        self._heap: list = []
        self._seq = 0
        self._loss_rng = random.Random(f"{cfg.seed}/loss")
        self._flows = cfg.resolved_flows()

        n = cfg.node_count
        mob_cfg = cfg.mobility_config()
        self._streams = [MobilityStream(mob_cfg, i) for i in range(n)]
        self._pause = cfg.pause_time
        # Current leg per node: (sx, sy, ex, ey, vx, vy, depart, arrive).
        self._legs: list[tuple] = [None] * n
        self._tx_free_at = [0.0] * n

        self.nodes = [AodvNode(i, cfg.variant, cfg.protocol, self,
                               random.Random(f"{cfg.seed}/proto/{i}"))
                      for i in range(n)]

        for i in range(n):
            start = self._streams[i].initial_position()
            self._begin_leg(i, start, 0.0)
        for node in self.nodes:
            node.start(0.0)
        for idx, flow in enumerate(self._flows):
            if flow.start_time < flow.stop_time:
                self._push(flow.start_time, EV_APP, idx, 0)
        if cfg.metrics_sample_interval:
            self._push(cfg.metrics_sample_interval, EV_SAMPLE, None, None)

    # -- event queue -------------------------------------------------------

    def _push(self, when: TimeSeconds, kind: int, a, b) -> None:
        if when < self.now:
            raise SimulationError(f"event {_KIND_NAMES[kind]} scheduled at {when} "
                                  f"in the past of t={self.now}")
        heapq.heappush(self._heap, (when, self._seq, kind, a, b))
        self._seq += 1

    def run(self, until: TimeSeconds | None = None) -> MetricsReport:
        """Process events up to the horizon and freeze the metrics."""
        if until is None:
            until = self.cfg.sim_time
        heap = self._heap
        trace = self.trace
        while heap and heap[0][0] <= until:
            when, _, kind, a, b = heapq.heappop(heap)
            self.now = when
            if kind == EV_DELIVER:
                self.nodes[a].on_message(b, when)
            elif kind == EV_TIMER:
                self.nodes[a].on_timer(b, when)
            elif kind == EV_APP:
                self._fire_app(a, b, when)
            elif kind == EV_ARRIVE:
                leg = self._legs[a]
                self._begin_leg(a, Vec2(leg[2], leg[3]), when)
            elif kind == EV_SEND_FAIL:
                self.nodes[a].on_send_failure(b[0], b[1], when)
            elif kind == EV_SAMPLE:
                self._take_sample(when)
            if trace is not None:
                ids = a if kind != EV_SEND_FAIL else f"{a}->{b[0]}"
                trace(f"{when!r},{_KIND_NAMES[kind]},{ids}\n")
        self.now = until
        return compute_metrics(self.counters, self._count_in_flight(),
                               {"rreq": self.cfg.protocol.rreq_bytes,
                                "rrep": self.cfg.protocol.rrep_bytes,
                                "rerr": self.cfg.protocol.rerr_bytes,
                                "hello": self.cfg.protocol.hello_bytes})

    def _count_in_flight(self) -> int:
        in_heap = sum(1 for ev in self._heap
                      if (ev[2] == EV_DELIVER and type(ev[4]) is Data)
                      or (ev[2] == EV_SEND_FAIL and type(ev[4][1]) is Data))
        queued = sum(len(p.queue) for node in self.nodes for p in node.pending.values())
        return in_heap + queued

    def _take_sample(self, now: TimeSeconds) -> None:
        c = self.counters
        self.samples.append({"time": now, "generated": c.generated,
                             "delivered": c.delivered,
                             "overhead": c.rreq + c.rrep + c.rerr + c.hello})
        self._push(now + self.cfg.metrics_sample_interval, EV_SAMPLE, None, None)

    # -- mobility ------------------------------------------------------------

    def _begin_leg(self, node: NodeId, start: Vec2, depart: TimeSeconds) -> None:
        leg = self._streams[node].next_leg(start, depart)
        travel = leg.travel_time
        if travel > 0.0:
            vx = (leg.end[0] - start[0]) / travel
            vy = (leg.end[1] - start[1]) / travel
        else:
            vx = vy = 0.0
        self._legs[node] = (start[0], start[1], leg.end[0], leg.end[1],
                            vx, vy, depart, depart + travel)
        self._push(depart + travel + self._pause, EV_ARRIVE, node, None)

    def position(self, node: NodeId) -> Vec2:
        sx, sy, ex, ey, vx, vy, depart, arrive = self._legs[node]
        t = self.now
        if t >= arrive:
            return Vec2(ex, ey)
        dt = t - depart
        return Vec2(sx + vx * dt, sy + vy * dt)

    def velocity(self, node: NodeId) -> Vec2:
        leg = self._legs[node]
        if self.now >= leg[7]:
            return Vec2(0.0, 0.0)
        return Vec2(leg[4], leg[5])

    def kinematics(self, node: NodeId) -> tuple[Vec2, Vec2]:
        return self.position(node), self.velocity(node)

    # -- radio ------------------------------------------------------------------

    def _tx_slot(self, frm: NodeId) -> TimeSeconds:
        start = self._tx_free_at[frm]
        if start < self.now:
            start = self.now
        self._tx_free_at[frm] = start + self.latency
        return start

    def _count_tx(self, msg) -> None:
        kind = type(msg)
        c = self.counters
        if kind is Hello:
            c.hello += 1
        elif kind is Rreq:
            c.rreq += 1
        elif kind is Rrep:
            c.rrep += 1
        elif kind is Rerr:
            c.rerr += 1
        else:
            c.data_tx += 1

    def _lost(self, msg) -> bool:
        if self.loss <= 0.0:
            return False
        if self._loss_rng.random() >= self.loss:
            return False
        if type(msg) is Data:
            # Silent radio loss of a data frame still has to land in a
            # conservation sink.
            self.counters.drop("link_failure")
        return True

    def broadcast(self, frm: NodeId, msg) -> None:
        """Queue a local broadcast; delivered to every node in range at slot start."""
        start = self._tx_slot(frm)
        self._count_tx(msg)
        if self.on_transmit is not None:
            self.on_transmit(start, frm, msg)
        arrive = start + self.latency
        sx, sy = self._at(frm, start)
        r2 = self.radio_range * self.radio_range
        for j in range(self.cfg.node_count):
            if j == frm:
                continue
            jx, jy = self._at(j, start)
            dx, dy = jx - sx, jy - sy
            if dx * dx + dy * dy <= r2 and not self._lost(msg):
                self._push(arrive, EV_DELIVER, j, msg)

    def unicast(self, frm: NodeId, to: NodeId, msg) -> None:
        """Queue a unicast; out-of-range targets bounce back as a send failure."""
        if frm == to:
            raise SimulationError(f"node {frm} unicasting to itself")
        start = self._tx_slot(frm)
        self._count_tx(msg)
        if self.on_transmit is not None:
            self.on_transmit(start, frm, msg)
        arrive = start + self.latency
        sx, sy = self._at(frm, start)
        jx, jy = self._at(to, start)
        dx, dy = jx - sx, jy - sy
        r2 = self.radio_range * self.radio_range
        if dx * dx + dy * dy <= r2:
            if not self._lost(msg):
                self._push(arrive, EV_DELIVER, to, msg)
        else:
            self._push(arrive, EV_SEND_FAIL, frm, (to, msg))

    def _at(self, node: NodeId, t: TimeSeconds) -> tuple[float, float]:
        sx, sy, ex, ey, vx, vy, depart, arrive = self._legs[node]
        if t >= arrive:
            return ex, ey
        dt = t - depart
        return sx + vx * dt, sy + vy * dt

    # -- services used by the protocol layer ---------------------------------------

    def schedule_timer(self, node: NodeId, when: TimeSeconds, key) -> None:
        self._push(when, EV_TIMER, node, key)

    def count(self, name: str) -> None:
        self.counters.note(name)

    def drop_data(self, pkt: Data, reason: str) -> None:
        self.counters.drop(reason)

    def data_delivered(self, pkt: Data, now: TimeSeconds) -> None:
        self.counters.delivered += 1
        self.counters.latencies.append(now - pkt.created_at)

    # -- traffic ---------------------------------------------------------------------

    def _fire_app(self, flow_idx: int, k: int, now: TimeSeconds) -> None:
        flow: Flow = self._flows[flow_idx]
        self.counters.generated += 1
        self.nodes[flow.source].app_send(flow.destination, flow.packet_size, now)
        # packets are indexed so generation times never accumulate float drift:
        # generation k fires at start + k/rate, strictly inside [start, stop)
        nxt = flow.start_time + (k + 1) / flow.rate
        if nxt < flow.stop_time:
            self._push(nxt, EV_APP, flow_idx, k + 1)


def run_scenario(cfg: ScenarioConfig, until: TimeSeconds | None = None) -> MetricsReport:
    """Build a simulator for `cfg`, run it to the horizon, return the report."""
    return Simulator(cfg).run(until)
