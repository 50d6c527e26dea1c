"""Mobility-only census of how long node pairs stay within radio range.

No protocol runs here: trajectories are sampled on a fixed grid and every
maximal stretch during which a pair remains connected becomes one duration
observation. Stretches touching the start or end of the observation window
are flagged censored, since their true length is unknown.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mobility import MobilityConfig, generate_legs


@dataclass(frozen=True)
class CensusResult:
    durations: tuple[float, ...]      # seconds, one per maximal connected interval
    censored: tuple[bool, ...]        # True when the interval hit the window edge
    resolution: float
    horizon: float
    bin_edges: tuple[float, ...]
    bin_counts: tuple[int, ...]
    bin_density: tuple[float, ...]    # normalized so sum(density * width) == 1

    @property
    def mean(self) -> float:
        return float(np.mean(self.durations)) if self.durations else 0.0

    @property
    def median(self) -> float:
        return float(np.median(self.durations)) if self.durations else 0.0

    def uncensored_durations(self) -> tuple[float, ...]:
        return tuple(d for d, c in zip(self.durations, self.censored) if not c)

    def total_connected_time(self) -> float:
        return float(sum(self.durations))


def sample_positions(cfg: MobilityConfig, node_count: int, horizon: float,
                     resolution: float = 0.1) -> np.ndarray:
    """Array of shape (node_count, samples, 2): positions on the time grid."""
    steps = int(round(horizon / resolution))
    grid = np.arange(steps + 1) * resolution
    out = np.empty((node_count, steps + 1, 2))
    for i in range(node_count):
        knots_t: list[float] = []
        knots_x: list[float] = []
        knots_y: list[float] = []
        for leg in generate_legs(cfg, i, horizon):
            if not knots_t or leg.depart_time > knots_t[-1]:
                knots_t.append(leg.depart_time)
                knots_x.append(leg.start[0])
                knots_y.append(leg.start[1])
            knots_t.append(leg.arrive_time)
            knots_x.append(leg.end[0])
            knots_y.append(leg.end[1])
        out[i, :, 0] = np.interp(grid, knots_t, knots_x)
        out[i, :, 1] = np.interp(grid, knots_t, knots_y)
    return out


def link_duration_census(cfg: MobilityConfig, node_count: int, radio_range: float,
                         horizon: float, resolution: float = 0.1,
                         bins: int = 50) -> CensusResult:
    """Histogram of connected-interval durations over all node pairs.

    Interval length is measured between its first and last connected grid
    sample, so a pair connected for the whole window scores exactly
    `horizon` and a single-sample touch scores zero.
    """
    if node_count < 2:
        raise ValueError("census needs at least two nodes")
    if resolution <= 0 or radio_range <= 0:
        raise ValueError("resolution and radio range must be positive")
    pos = sample_positions(cfg, node_count, horizon, resolution)
    r2 = radio_range * radio_range
    durations: list[float] = []
    censored: list[bool] = []
    last = pos.shape[1] - 1
    for i in range(node_count - 1):
        diff = pos[i + 1:] - pos[i]
        conn = (diff * diff).sum(axis=2) <= r2            # (pairs, samples)
        for row in conn:
            # maximal runs of consecutive connected samples
            edges = np.diff(row.astype(np.int8))
            starts = np.flatnonzero(edges == 1) + 1
            ends = np.flatnonzero(edges == -1)
            if row[0]:
                starts = np.concatenate(([0], starts))
            if row[last]:
                ends = np.concatenate((ends, [last]))
            for a, b in zip(starts, ends):
                durations.append(float(b - a) * resolution)
                censored.append(bool(a == 0 or b == last))
    if durations:
        top = max(max(durations), resolution)
        counts, edges = np.histogram(durations, bins=bins, range=(0.0, top))
        total = counts.sum()
        widths = np.diff(edges)
        density = counts / (total * widths) if total else np.zeros_like(widths)
    else:
        counts = np.zeros(bins, dtype=int)
        edges = np.linspace(0.0, 1.0, bins + 1)
        density = np.zeros(bins)
    return CensusResult(durations=tuple(durations), censored=tuple(censored),
                        resolution=resolution, horizon=horizon,
                        bin_edges=tuple(edges.tolist()),
                        bin_counts=tuple(int(c) for c in counts),
                        bin_density=tuple(density.tolist()))


def write_census_csv(result: CensusResult, out) -> None:
    out.write("bin_lo,bin_hi,count,density\n")
    for lo, hi, c, d in zip(result.bin_edges, result.bin_edges[1:],
                            result.bin_counts, result.bin_density):
        out.write(f"{lo!r},{hi!r},{c},{d!r}\n")
