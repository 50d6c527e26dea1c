"""Run counters and the derived performance metrics.

Overhead is counted in transmissions: every broadcast or unicast of a
control message adds one to its kind's counter, no matter how many radios
hear it. The three headline metrics are

  normalized routing load  = control transmissions / delivered data packets
  packet delivery ratio    = delivered / generated
  average end-to-end delay = mean(arrival - creation) over delivered packets

Ratios with a zero denominator are reported as None rather than raising.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class RawCounters:
    """Mutable tallies filled in by the engine while a scenario runs."""

    rreq: int = 0
    rrep: int = 0
    rerr: int = 0
    hello: int = 0
    data_tx: int = 0
    generated: int = 0
    delivered: int = 0
    latencies: list[float] = field(default_factory=list)
    drops: dict[str, int] = field(default_factory=dict)
    diagnostics: dict[str, int] = field(default_factory=dict)

    def drop(self, reason: str) -> None:
        self.drops[reason] = self.drops.get(reason, 0) + 1

    def note(self, name: str) -> None:
        self.diagnostics[name] = self.diagnostics.get(name, 0) + 1


@dataclass(frozen=True)
class MetricsReport:
    """Immutable end-of-run summary; serializes canonically for determinism checks."""

    rreq: int
    rrep: int
    rerr: int
    hello: int
    data_tx: int
    generated: int
    delivered: int
    dropped_no_route: int
    dropped_queue_overflow: int
    dropped_link_failure: int
    in_flight_at_horizon: int
    latencies: tuple[float, ...]
    diagnostics: dict[str, int]
    overhead_bytes: int

    @property
    def overhead_transmissions(self) -> int:
        return self.rreq + self.rrep + self.rerr + self.hello

    @property
    def pdr(self) -> float | None:
        if self.generated == 0:
            return None
        return self.delivered / self.generated

    @property
    def normalized_routing_load(self) -> float | None:
        if self.delivered == 0:
            return None
        return self.overhead_transmissions / self.delivered

    @property
    def avg_delay(self) -> float | None:
        if not self.latencies:
            return None
        return sum(self.latencies) / len(self.latencies)

    def conservation_holds(self) -> bool:
        sunk = (self.delivered + self.dropped_no_route + self.dropped_queue_overflow
                + self.dropped_link_failure + self.in_flight_at_horizon)
        return self.generated == sunk

    def to_json_bytes(self) -> bytes:
        payload = {
            "rreq": self.rreq, "rrep": self.rrep, "rerr": self.rerr,
            "hello": self.hello, "data_tx": self.data_tx,
            "generated": self.generated, "delivered": self.delivered,
            "dropped_no_route": self.dropped_no_route,
            "dropped_queue_overflow": self.dropped_queue_overflow,
            "dropped_link_failure": self.dropped_link_failure,
            "in_flight_at_horizon": self.in_flight_at_horizon,
            "latencies": list(self.latencies),
            "diagnostics": self.diagnostics,
            "overhead_bytes": self.overhead_bytes,
            "pdr": self.pdr,
            "nrl": self.normalized_routing_load,
            "avg_delay": self.avg_delay,
        }
        return json.dumps(payload, sort_keys=True).encode()


def compute_metrics(raw: RawCounters, in_flight: int, msg_bytes: dict[str, int]) -> MetricsReport:
    """Freeze raw counters into a report with the derived metrics."""
    if raw.delivered != len(raw.latencies):
        raise ValueError(f"latency list ({len(raw.latencies)}) out of step "
                         f"with delivered count ({raw.delivered})")
    overhead_bytes = (raw.rreq * msg_bytes.get("rreq", 0)
                      + raw.rrep * msg_bytes.get("rrep", 0)
                      + raw.rerr * msg_bytes.get("rerr", 0)
                      + raw.hello * msg_bytes.get("hello", 0))
    return MetricsReport(
        rreq=raw.rreq, rrep=raw.rrep, rerr=raw.rerr, hello=raw.hello,
        data_tx=raw.data_tx, generated=raw.generated, delivered=raw.delivered,
        dropped_no_route=raw.drops.get("no_route", 0),
        dropped_queue_overflow=raw.drops.get("queue_overflow", 0),
        dropped_link_failure=raw.drops.get("link_failure", 0),
        in_flight_at_horizon=in_flight,
        latencies=tuple(raw.latencies),
        diagnostics=dict(sorted(raw.diagnostics.items())),
        overhead_bytes=overhead_bytes,
    )
