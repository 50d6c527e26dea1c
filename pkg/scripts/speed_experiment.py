#!/usr/bin/env python3
"""Constant-speed comparison: all four variants at pedestrian through vehicular
speeds, aggregated over seeds. Produces results.csv / aggregate.csv."""

import argparse

from ampsim import ProtocolVariant, desk_scenario
from ampsim.sweep import emit_results, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--speeds", default="1,10,20")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--workers", type=int, default=2)
    ap.add_argument("--out", default="out/speed")
    args = ap.parse_args()

    speeds = [float(v) for v in args.speeds.split(",")]
    result = run_sweep(desk_scenario(), "speed", speeds, list(ProtocolVariant),
                       list(range(args.seeds)), workers=args.workers,
                       progress=lambda row: print(".", end="", flush=True))
    print()
    rows_path, agg_path = emit_results(result, args.out)
    print(f"{len(result.rows)} rows -> {rows_path}")
    print(f"aggregates -> {agg_path}")


if __name__ == "__main__":
    main()
