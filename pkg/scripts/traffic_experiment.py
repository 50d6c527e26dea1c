#!/usr/bin/env python3
"""Offered-load comparison: growing numbers of source-destination pairs under
mixed 1-20 m/s mobility."""

import argparse

from ampsim import ProtocolVariant, desk_scenario
from ampsim.sweep import emit_results, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", default="5,10,15")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--workers", type=int, default=2)
    ap.add_argument("--out", default="out/traffic")
    args = ap.parse_args()

    pairs = [int(v) for v in args.pairs.split(",")]
    result = run_sweep(desk_scenario(), "flows", pairs, list(ProtocolVariant),
                       list(range(args.seeds)), workers=args.workers,
                       progress=lambda row: print(".", end="", flush=True))
    print()
    rows_path, agg_path = emit_results(result, args.out)
    print(f"{len(result.rows)} rows -> {rows_path}")
    print(f"aggregates -> {agg_path}")


if __name__ == "__main__":
    main()
