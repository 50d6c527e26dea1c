"""High-volume property checks over the protocol and its primitives."""

import math
import random

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from ampsim.geometry import Vec2
from ampsim.messages import ProtocolVariant, Rreq
from ampsim.mobility import MobilityConfig, generate_legs, position_at
from ampsim.prediction import RelativeState, predict_link_duration
from ampsim.protocol import RouteCandidate, select_route

from rigs import connected_points, static_simulator

HEAVY = settings(max_examples=1000, deadline=None,
                 suppress_health_check=[HealthCheck.too_slow,
                                        HealthCheck.filter_too_much])

topology_seeds = st.tuples(st.integers(5, 12), st.integers(0, 2**31))


def run_one_discovery(n, seed, variant=ProtocolVariant.AMP2):
    """Static connected topology, one flood from node 0 to node n-1."""
    rng = random.Random(seed)
    points = connected_points(rng, n)
    log = []
    sim = static_simulator(points, variant=variant, seed=seed, sim_time=1.0,
                           on_transmit=lambda t, frm, msg: log.append((t, frm, msg)))
    sim.nodes[0].app_send(n - 1, 512, 0.0)
    sim.run()
    return sim, points, log


@HEAVY
@given(topology_seeds)
def test_flood_terminates_within_node_budget(args):
    n, seed = args
    sim, _, log = run_one_discovery(n, seed)
    per_flood = {}
    for _, frm, msg in log:
        if isinstance(msg, Rreq):
            key = (msg.origin, msg.broadcast_id)
            per_flood.setdefault(key, []).append(frm)
    assert per_flood, "discovery never flooded"
    for key, senders in per_flood.items():
        assert len(senders) == len(set(senders)), f"node rebroadcast twice in {key}"
        assert len(senders) <= n


@HEAVY
@given(topology_seeds)
def test_ret_nonincreasing_with_hop_distance(args):
    n, seed = args
    sim, points, log = run_one_discovery(n, seed)
    rreqs = [(t, frm, msg) for t, frm, msg in log if isinstance(msg, Rreq)]
    r = 250.0
    for t, frm, msg in rreqs:
        if msg.hop_count == 1:
            assert msg.ret == math.inf        # origin starts unbounded
            continue
        # every rebroadcast folds at most downward from some in-range copy
        # transmitted one hop earlier
        parents = [m for pt, pf, m in rreqs
                   if pt <= t and m.hop_count == msg.hop_count - 1
                   and math.dist(points[pf], points[frm]) <= r]
        assert parents, f"no parent for rebroadcast at hop {msg.hop_count}"
        assert any(m.ret >= msg.ret for m in parents)


@HEAVY
@given(topology_seeds)
def test_no_routing_loops_on_static_topologies(args):
    n, seed = args
    sim, _, _ = run_one_discovery(n, seed)
    for start in range(n):
        for dest in range(n):
            node = sim.nodes[start]
            entry = node.routes.get(dest)
            if entry is None or not entry.valid:
                continue
            walked = [start]
            current, hops_left = start, entry.hop_count
            while current != dest:
                e = sim.nodes[current].routes.get(dest)
                if e is None or not e.valid:
                    break                      # chain ends without a loop
                current = e.next_hop
                assert current not in walked, f"loop {walked + [current]} to {dest}"
                walked.append(current)
                hops_left -= 1
                assert hops_left >= -n, "walk exceeded any plausible bound"


@HEAVY
@given(topology_seeds)
def test_connected_static_discovery_always_succeeds(args):
    n, seed = args
    sim, _, _ = run_one_discovery(n, seed)
    entry = sim.nodes[0].routes.get(n - 1)
    assert entry is not None and entry.valid


candidates_strategy = st.lists(
    st.builds(RouteCandidate,
              st.integers(0, 50),
              st.integers(1, 12),
              st.one_of(st.floats(0.001, 1e4), st.just(math.inf))),
    min_size=1, max_size=10)


@HEAVY
@given(candidates_strategy, st.integers(-20, 20))
def test_selection_invariant_under_positive_scaling(cands, k):
    c = 2.0 ** k   # exact scaling in binary floating point
    scaled = [RouteCandidate(x.next_hop, x.hop_count, x.ret * c) for x in cands]
    for variant in (ProtocolVariant.AMP1, ProtocolVariant.AMP2, ProtocolVariant.AMP3):
        assert select_route(variant, cands) == select_route(variant, scaled)


@HEAVY
@given(candidates_strategy)
def test_amp1_choice_never_has_more_hops_than_any_candidate(cands):
    chosen = cands[select_route(ProtocolVariant.AMP1, cands)]
    assert chosen.hop_count == min(c.hop_count for c in cands)


MOB = MobilityConfig(area_width=800.0, area_height=600.0, v_min=1.0, v_max=20.0,
                     pause_time=0.0, rng_seed=99)


@HEAVY
@given(st.integers(0, 200), st.floats(0.0, 299.0))
def test_trajectories_continuous_and_inside_field(nid, t):
    legs = generate_legs(MOB, nid, horizon=300.0)
    leg = next(l for l in reversed(legs) if l.depart_time <= t)
    p = position_at(leg, t)
    assert MOB.contains(p)
    eps = 1e-6
    leg2 = next(l for l in reversed(legs) if l.depart_time <= t + eps)
    q = position_at(leg2, t + eps)
    # continuity with the Lipschitz bound given by the max speed
    assert math.dist(p, q) <= MOB.v_max * eps + 1e-9


@HEAVY
@given(st.integers(0, 2**31), st.integers(-6, 6))
def test_link_duration_scales_inversely_with_speed(seed, k):
    rng = random.Random(seed)
    r = rng.choice([250.0, 300.0])
    rho, phi = r * math.sqrt(rng.random()), rng.uniform(0, 2 * math.pi)
    speed, theta = rng.uniform(4.0, 24.0), rng.uniform(0, 2 * math.pi)
    p = Vec2(rho * math.cos(phi), rho * math.sin(phi))
    v = Vec2(speed * math.cos(theta), speed * math.sin(theta))
    c = 2.0 ** k
    base = predict_link_duration(RelativeState(p, v), r)
    scaled = predict_link_duration(RelativeState(p, Vec2(v.x * c, v.y * c)), r)
    assert scaled == pytest.approx(base / c, rel=1e-9)
