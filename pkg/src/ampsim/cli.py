"""Command-line front end: run one scenario, sweep an axis, census link
durations, or check the route-selection conformance fixture."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .census import link_duration_census, write_census_csv
from .config import (ConfigError, PRESETS, ScenarioConfig, config_from_dict,
                     load_config, variant_from_name)
from .engine import Simulator
from .messages import ProtocolVariant
from .mobility import MobilityConfig, generate_legs, write_leg_log
from .protocol import RouteCandidate, select_route
from .sweep import AXES, emit_results, run_sweep


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML scenario file layered over the preset")
    p.add_argument("--preset", choices=sorted(PRESETS), default="desk")
    p.add_argument("--variant", help="aodv, amp1, amp2 or amp3")
    p.add_argument("--seed", type=int, help="scenario seed")


def _build_config(args, **extra) -> ScenarioConfig:
    overrides = dict(extra)
    if args.variant:
        overrides["variant"] = variant_from_name(args.variant)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.config:
        return load_config(args.config, preset=args.preset, **overrides)
    return config_from_dict({}, preset=args.preset, **overrides)


def _parse_values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values expects comma-separated numbers, got {text!r}") from None


def cmd_run(args) -> int:
    cfg = _build_config(args)
    trace_fh = None
    try:
        if args.trace:
            out_dir = Path(args.out or ".")
            out_dir.mkdir(parents=True, exist_ok=True)
            trace_fh = open(out_dir / "trace.csv", "w")
            trace_fh.write("time,kind,node_ids\n")
        sim = Simulator(cfg, trace=trace_fh.write if trace_fh else None)
        report = sim.run()
    finally:
        if trace_fh:
            trace_fh.close()
    payload = report.to_json_bytes().decode()
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.json").write_text(payload + "\n")
    print(payload)
    if not report.conservation_holds():
        print("error: packet conservation identity violated", file=sys.stderr)
        return 1
    return 0


def cmd_sweep(args) -> int:
    if args.variant:
        variants = [variant_from_name(v) for v in args.variant.split(",")]
    else:
        variants = list(ProtocolVariant)
    args.variant = None          # the sweep grid owns the variant axis
    cfg = _build_config(args)
    values = _parse_values(args.values)
    seeds = list(range(args.seeds))
    result = run_sweep(cfg, args.axis, values, variants, seeds,
                       workers=args.workers,
                       progress=(lambda row: print(".", end="", flush=True))
                       if not args.quiet else None)
    if not args.quiet:
        print()
    rows_path, agg_path = emit_results(result, args.out)
    print(f"wrote {len(result.rows)} rows to {rows_path}")
    print(f"wrote {len(result.aggregates)} aggregates to {agg_path}")
    for failure in result.failures:
        print(f"failed: {failure.value} {failure.variant.value} seed={failure.seed}: "
              f"{failure.error}", file=sys.stderr)
    return 0


def cmd_census(args) -> int:
    # the census runs mobility only, so flow settings never apply
    cfg = _build_config(args, flows=(), flow_pairs=0)
    mob = MobilityConfig(area_width=cfg.area_width, area_height=cfg.area_height,
                         v_min=args.v_min if args.v_min else cfg.v_min,
                         v_max=args.v_max if args.v_max else cfg.v_max,
                         pause_time=cfg.pause_time, rng_seed=cfg.seed)
    radio_range = args.range if args.range else cfg.radio.range
    result = link_duration_census(mob, cfg.node_count, radio_range,
                                  horizon=cfg.sim_time, resolution=args.resolution,
                                  bins=args.bins)
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "census.csv", "w") as fh:
        write_census_csv(result, fh)
    if args.dump_legs:
        legs = {i: generate_legs(mob, i, cfg.sim_time) for i in range(cfg.node_count)}
        with open(out_dir / "legs.csv", "w") as fh:
            write_leg_log(legs, fh)
    n = len(result.durations)
    print(f"{n} intervals, mean {result.mean:.2f} s, median {result.median:.2f} s "
          f"-> {out_dir / 'census.csv'}")
    return 0


# The worked selection example: three candidate routes of (hops, expiration)
# = (3, 12 s), (3, 15 s), (4, 17 s). Expected picks per variant below.
FIXTURE_CANDIDATES = (RouteCandidate(next_hop=1, hop_count=3, ret=12.0),
                      RouteCandidate(next_hop=2, hop_count=3, ret=15.0),
                      RouteCandidate(next_hop=3, hop_count=4, ret=17.0))
FIXTURE_EXPECTED = {ProtocolVariant.AMP1: 1, ProtocolVariant.AMP2: 2,
                    ProtocolVariant.AMP3: 1}


def cmd_fixture(args) -> int:
    failed = False
    for variant, want in FIXTURE_EXPECTED.items():
        got = select_route(variant, FIXTURE_CANDIDATES)
        ok = got == want
        failed |= not ok
        print(f"{variant.value}: candidate {got + 1} "
              f"({'ok' if ok else f'expected {want + 1}'})")
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ampsim",
                                     description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and print its metrics")
    _add_config_args(p_run)
    p_run.add_argument("--out", help="directory for report.json (and trace.csv)")
    p_run.add_argument("--trace", action="store_true", help="dump the event trace")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep one axis over variants and seeds")
    _add_config_args(p_sweep)
    p_sweep.add_argument("--axis", choices=AXES, required=True)
    p_sweep.add_argument("--values", required=True, help="comma-separated axis values")
    p_sweep.add_argument("--seeds", type=int, default=20,
                         help="number of seeds (0..N-1) per grid point")
    p_sweep.add_argument("--out", required=True, help="output directory for CSV files")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--quiet", action="store_true")
    p_sweep.set_defaults(func=cmd_sweep)

    p_census = sub.add_parser("census", help="mobility-only link-duration census")
    _add_config_args(p_census)
    p_census.add_argument("--range", type=float, help="radio range override (m)")
    p_census.add_argument("--v-min", type=float, help="speed range override (m/s)")
    p_census.add_argument("--v-max", type=float, help="speed range override (m/s)")
    p_census.add_argument("--resolution", type=float, default=0.1)
    p_census.add_argument("--bins", type=int, default=50)
    p_census.add_argument("--out", help="output directory")
    p_census.add_argument("--dump-legs", action="store_true",
                          help="also write the waypoint-leg log")
    p_census.set_defaults(func=cmd_census)

    p_fix = sub.add_parser("fixture", help="route-selection conformance check")
    p_fix.set_defaults(func=cmd_fixture)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
