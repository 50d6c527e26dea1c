"""Acceptance gate: one test per criterion, each printing a PASS line.

The comparative criteria run 20-seed sweeps of the desk-scale scenario
(30 nodes on 800 x 600 m, 250 m range, 5 CBR flows, 900 s horizon). On two
cores the whole module takes roughly 20-30 minutes; everything is
deterministic, so reruns are byte-stable.
"""

import math
import os
import random
import subprocess
import sys
from statistics import fmean

import numpy as np
import pytest

from ampsim.census import link_duration_census
from ampsim.cli import main as cli_main
from ampsim.config import ScenarioConfig, desk_scenario
from ampsim.engine import run_scenario
from ampsim.messages import ProtocolVariant
from ampsim.mobility import MobilityConfig
from ampsim.prediction import (UNBOUNDED, RelativeState, predict_link_duration,
                               route_expiration, tighten_expiration)
from ampsim.protocol import RouteCandidate, select_route
from ampsim.sweep import run_sweep

SEEDS = list(range(20))
VARIANTS = list(ProtocolVariant)
AMPS = [ProtocolVariant.AMP1, ProtocolVariant.AMP2, ProtocolVariant.AMP3]
WORKERS = max(1, min(4, os.cpu_count() or 1))


def ok(criterion: str, detail: str = ""):
    print(f"ACCEPTANCE {criterion}: PASS {detail}".rstrip())


def group_means(rows, field: str):
    """(value, variant) -> 20-seed mean of one row metric."""
    acc = {}
    for row in rows:
        acc.setdefault((row.value, row.variant), []).append(getattr(row, field))
    return {k: fmean(v) for k, v in acc.items()}


@pytest.fixture(scope="module")
def speed_sweep():
    base = desk_scenario()
    res = run_sweep(base, "speed", [1.0, 10.0, 20.0], VARIANTS, SEEDS,
                    workers=WORKERS)
    assert not res.failures
    return res


@pytest.fixture(scope="module")
def flow_sweep():
    base = desk_scenario()
    res = run_sweep(base, "flows", [5, 10, 15], VARIANTS, SEEDS, workers=WORKERS)
    assert not res.failures
    return res


@pytest.fixture(scope="module")
def node_sweep():
    base = desk_scenario()
    res = run_sweep(base, "nodes", [20, 30, 40], VARIANTS, SEEDS, workers=WORKERS)
    assert not res.failures
    return res


# -- criterion 1: worked-example selection fixture ---------------------------------

def test_c1_selection_fixture_exact():
    table = [RouteCandidate(next_hop=1, hop_count=3, ret=12.0),
             RouteCandidate(next_hop=2, hop_count=3, ret=15.0),
             RouteCandidate(next_hop=3, hop_count=4, ret=17.0)]
    assert select_route(ProtocolVariant.AMP1, table) == 1   # route 2
    assert select_route(ProtocolVariant.AMP2, table) == 2   # route 3
    assert select_route(ProtocolVariant.AMP3, table) == 1   # route 2
    assert cli_main(["fixture"]) == 0
    ok("1", "selection picks route 2 / route 3 / route 2; fixture exits 0")


# -- criterion 2: closed form vs time-stepping oracle ------------------------------

def stepping_first_exit(px, py, vx, vy, r, step=1e-3):
    speed = math.hypot(vx, vy)
    horizon = 2.0 * r / speed + 2.0 * step
    t = np.arange(int(horizon / step) + 2) * step
    outside = (px + vx * t) ** 2 + (py + vy * t) ** 2 > r * r
    idx = int(np.argmax(outside))
    assert bool(outside[idx])
    return t[idx]


def test_c2_link_duration_matches_stepping_oracle():
    rng = random.Random(2024)
    checked = 0
    for r in (250.0, 300.0):
        for _ in range(5000):
            rho = r * math.sqrt(rng.random())
            phi = rng.uniform(0.0, 2 * math.pi)
            speed = rng.uniform(4.0, 24.0)
            theta = rng.uniform(0.0, 2 * math.pi)
            px, py = rho * math.cos(phi), rho * math.sin(phi)
            vx, vy = speed * math.cos(theta), speed * math.sin(theta)
            closed = predict_link_duration(
                RelativeState((px, py), (vx, vy)), r)
            assert closed != UNBOUNDED
            stepped = stepping_first_exit(px, py, vx, vy, r)
            assert abs(stepped - closed) <= 1e-3 + 1e-9, (px, py, vx, vy, r)
            checked += 1
        # zero relative velocity stays connected forever
        for _ in range(50):
            rho = r * math.sqrt(rng.random())
            phi = rng.uniform(0.0, 2 * math.pi)
            assert predict_link_duration(
                RelativeState((rho * math.cos(phi), rho * math.sin(phi)),
                              (0.0, 0.0)), r) == UNBOUNDED
    ok("2", f"{checked} closed-form durations within 1e-3 s of the stepping oracle")


# -- criterion 3: fold/aggregate equivalence ----------------------------------------

def test_c3_fold_equals_aggregate_exactly():
    rng = random.Random(7)
    for _ in range(1000):
        n = rng.randint(1, 12)
        ldts = [UNBOUNDED if rng.random() < 0.15 else rng.uniform(0.0, 500.0)
                for _ in range(n)]
        folded = UNBOUNDED
        for d in ldts:
            folded = tighten_expiration(folded, d)
        assert folded == route_expiration(ldts)
    ok("3", "1000 random lists fold to the exact aggregate minimum")


# -- criterion 4: determinism and packet conservation --------------------------------

def test_c4_determinism_and_conservation():
    cfg = desk_scenario(seed=11, variant=ProtocolVariant.AMP2)
    a = run_scenario(cfg)
    b = run_scenario(cfg)
    assert a.to_json_bytes() == b.to_json_bytes()
    for seed in SEEDS:
        rep = run_scenario(desk_scenario(seed=seed))
        assert rep.conservation_holds(), f"conservation broken at seed {seed}"
    ok("4", "byte-identical replay; conservation holds on 20 desk-scale seeds")


# -- criterion 5: overhead reduction at low mobility -----------------------------------

def test_c5_low_mobility_overhead_reduction(speed_sweep):
    nrl = group_means(speed_sweep.rows, "nrl")
    base = nrl[(1.0, ProtocolVariant.AODV)]
    worst = None
    for amp in AMPS:
        reduction = 1.0 - nrl[(1.0, amp)] / base
        worst = reduction if worst is None else min(worst, reduction)
        assert nrl[(1.0, amp)] <= 0.8 * base, (
            f"{amp.value} load {nrl[(1.0, amp)]:.3f} not 20% below baseline {base:.3f}")
    ok("5", f"every variant cuts normalized load by >= {worst:.0%} at 1 m/s")


# -- criterion 6: hello share falls, discovery share rises with speed -------------------

def test_c6_baseline_overhead_composition(speed_sweep):
    shares = {}
    for speed in (1.0, 10.0, 20.0):
        rows = [r for r in speed_sweep.rows
                if r.value == speed and r.variant is ProtocolVariant.AODV]
        hello = fmean(r.hello for r in rows)
        rreq = fmean(r.rreq for r in rows)
        rrep = fmean(r.rrep for r in rows)
        rerr = fmean(r.rerr for r in rows)
        total = hello + rreq + rrep + rerr
        shares[speed] = (hello / total, (rreq + rrep) / total)
        if speed == 1.0:
            assert hello > max(rreq, rrep, rerr), "hello not the largest category"
    assert shares[1.0][0] > shares[10.0][0] > shares[20.0][0]
    assert shares[1.0][1] < shares[10.0][1] < shares[20.0][1]
    ok("6", "hello share %.2f -> %.2f -> %.2f as speed rises" %
       tuple(shares[s][0] for s in (1.0, 10.0, 20.0)))


# -- criterion 7: delivery, delay and request-count orderings ----------------------------

def test_c7_comparative_delivery_and_delay(speed_sweep):
    pdr = group_means(speed_sweep.rows, "pdr")
    delay = group_means(speed_sweep.rows, "avg_delay_s")
    rreq = group_means(speed_sweep.rows, "rreq")
    for speed in (1.0, 10.0, 20.0):
        best_pdr = max(pdr[(speed, amp)] for amp in AMPS)
        best_delay = min(delay[(speed, amp)] for amp in AMPS)
        assert best_pdr >= pdr[(speed, ProtocolVariant.AODV)], speed
        assert best_delay <= delay[(speed, ProtocolVariant.AODV)], speed
    assert rreq[(20.0, ProtocolVariant.AMP1)] >= rreq[(20.0, ProtocolVariant.AMP2)]
    assert rreq[(20.0, ProtocolVariant.AMP1)] >= rreq[(20.0, ProtocolVariant.AMP3)]
    ok("7", "best-variant delivery/delay dominate baseline at 1, 10, 20 m/s")


# -- criterion 8: traffic-load and density trends ------------------------------------------

def inversions(series, direction):
    """Count adjacent steps that defy the expected direction."""
    bad = 0
    for a, b in zip(series, series[1:]):
        if direction == "non-increasing" and b > a:
            bad += 1
        if direction == "non-decreasing" and b < a:
            bad += 1
    return bad


def test_c8_load_and_density_trends(flow_sweep, node_sweep):
    pdr = group_means(flow_sweep.rows, "pdr")
    delay = group_means(flow_sweep.rows, "avg_delay_s")
    for variant in VARIANTS:
        pdr_curve = [pdr[(v, variant)] for v in (5.0, 10.0, 15.0)]
        delay_curve = [delay[(v, variant)] for v in (5.0, 10.0, 15.0)]
        assert inversions(pdr_curve, "non-increasing") <= 1, (variant, pdr_curve)
        assert inversions(delay_curve, "non-decreasing") <= 1, (variant, delay_curve)
    nrl_nodes = group_means(node_sweep.rows, "nrl")
    for variant in VARIANTS:
        curve = [nrl_nodes[(v, variant)] for v in (20.0, 30.0, 40.0)]
        assert inversions(curve, "non-decreasing") <= 1, (variant, curve)
    nrl_flows = group_means(flow_sweep.rows, "nrl")
    for amp in AMPS:
        for v in (5.0, 10.0, 15.0):
            assert nrl_flows[(v, amp)] <= nrl_flows[(v, ProtocolVariant.AODV)]
        for v in (20.0, 30.0, 40.0):
            assert nrl_nodes[(v, amp)] <= nrl_nodes[(v, ProtocolVariant.AODV)]
    # every sweep row also satisfies the conservation identity
    for row in list(flow_sweep.rows) + list(node_sweep.rows):
        assert row.conserved
    ok("8", "delivery/delay/load trends hold across flow and density sweeps")


# -- criterion 9: link-duration census shape -------------------------------------------------

def test_c9_census_right_skew():
    mob = MobilityConfig(area_width=800.0, area_height=600.0, v_min=4.0,
                         v_max=24.0, pause_time=0.0, rng_seed=1)
    res = link_duration_census(mob, node_count=30, radio_range=300.0, horizon=900.0)
    durations = np.array(res.durations)
    assert len(durations) > 100
    mean, median = durations.mean(), float(np.median(durations))
    below = float((durations < mean).mean())
    assert median < mean
    assert below >= 0.60
    ok("9", f"median {median:.1f} s < mean {mean:.1f} s; {below:.0%} of mass below mean")


# -- criterion 10: property suites at >= 1000 cases each ---------------------------------------

def test_c10_property_suites_pass():
    here = os.path.dirname(__file__)
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", os.path.join(here, "test_properties.py"),
         "-q", "--no-header", "-p", "no:cacheprovider"],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    ok("10", "invariant property suites pass at 1000 cases per property")
