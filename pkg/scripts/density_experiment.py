#!/usr/bin/env python3
"""Node-density comparison: same field and traffic, growing node counts."""

import argparse

from ampsim import ProtocolVariant, desk_scenario
from ampsim.sweep import emit_results, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nodes", default="20,30,40")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--workers", type=int, default=2)
    ap.add_argument("--out", default="out/density")
    args = ap.parse_args()

    counts = [int(v) for v in args.nodes.split(",")]
    result = run_sweep(desk_scenario(), "nodes", counts, list(ProtocolVariant),
                       list(range(args.seeds)), workers=args.workers,
                       progress=lambda row: print(".", end="", flush=True))
    print()
    rows_path, agg_path = emit_results(result, args.out)
    print(f"{len(result.rows)} rows -> {rows_path}")
    print(f"aggregates -> {agg_path}")


if __name__ == "__main__":
    main()
