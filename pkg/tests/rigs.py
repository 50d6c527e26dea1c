"""Shared test rigs: frozen-topology simulators and topology generators."""

import heapq
import math
import random

from ampsim.config import ScenarioConfig
from ampsim.engine import EV_ARRIVE, Simulator
from ampsim.messages import ProtocolVariant


def static_simulator(points, variant=ProtocolVariant.AMP2, flows=(), seed=0,
                     sim_time=1.0, on_transmit=None) -> Simulator:
    """Simulator whose nodes sit frozen at the given coordinates."""
    span = max(max(x for x, _ in points), max(y for _, y in points), 1.0)
    cfg = ScenarioConfig(node_count=len(points), area_width=span + 1.0,
                         area_height=span + 1.0, sim_time=sim_time, seed=seed,
                         variant=variant, flows=tuple(flows), flow_pairs=0)
    sim = Simulator(cfg, on_transmit=on_transmit)
    sim._heap = [ev for ev in sim._heap if ev[2] != EV_ARRIVE]
    heapq.heapify(sim._heap)
    sim._legs = [(x, y, x, y, 0.0, 0.0, 0.0, math.inf) for x, y in points]
    return sim


def connected_points(rng: random.Random, n: int, radio_range: float = 250.0):
    """n random positions rescaled so the unit-disk graph is connected.

    Scales the point cloud so the longest edge of its minimum spanning tree
    sits at 80% of the radio range: the graph stays connected with a mix of
    short and near-limit links.
    """
    pts = [(rng.random(), rng.random()) for _ in range(n)]
    in_tree = [0]
    best = {i: math.dist(pts[0], pts[i]) for i in range(1, n)}
    longest = 0.0
    while best:
        j = min(best, key=lambda k: (best[k], k))
        longest = max(longest, best.pop(j))
        in_tree.append(j)
        for k in best:
            d = math.dist(pts[j], pts[k])
            if d < best[k]:
                best[k] = d
    scale = 0.8 * radio_range / max(longest, 1e-9)
    return [(x * scale, y * scale) for x, y in pts]
