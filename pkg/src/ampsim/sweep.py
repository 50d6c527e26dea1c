"""Experiment sweeps: run a scenario grid, aggregate over seeds, emit CSV.

A sweep varies one axis (node speed, number of traffic pairs, or node
count) across a list of values, for each protocol variant and seed. Rows
are independent jobs; with `workers > 1` they run in separate processes,
and the merge order is fixed by the (value, variant, seed) grid, so worker
count never changes the output bytes.
"""

from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .config import ConfigError, ScenarioConfig
from .engine import run_scenario
from .messages import ProtocolVariant
from .metrics import MetricsReport

AXES = ("speed", "flows", "nodes")

ROW_HEADER = ("axis_value,variant,seed,generated,delivered,pdr,nrl,avg_delay_s,"
              "rreq,rrep,rerr,hello")


@dataclass(frozen=True)
class SweepRow:
    """Flattened per-run metrics; full reports (with per-packet latencies)
    stay inside the worker to keep big sweeps cheap to hold and pickle."""

    axis: str
    value: float
    variant: ProtocolVariant
    seed: int
    generated: int
    delivered: int
    pdr: float | None
    nrl: float | None
    avg_delay_s: float | None
    rreq: int
    rrep: int
    rerr: int
    hello: int
    conserved: bool

    @staticmethod
    def from_report(axis: str, value: float, variant: ProtocolVariant,
                    seed: int, report: MetricsReport) -> "SweepRow":
        return SweepRow(axis=axis, value=float(value), variant=variant, seed=seed,
                        generated=report.generated, delivered=report.delivered,
                        pdr=report.pdr, nrl=report.normalized_routing_load,
                        avg_delay_s=report.avg_delay, rreq=report.rreq,
                        rrep=report.rrep, rerr=report.rerr, hello=report.hello,
                        conserved=report.conservation_holds())

    def csv_line(self) -> str:
        return (f"{_fmt(self.value)},{self.variant.value},{self.seed},"
                f"{self.generated},{self.delivered},{_fmt(self.pdr)},{_fmt(self.nrl)},"
                f"{_fmt(self.avg_delay_s)},{self.rreq},{self.rrep},{self.rerr},{self.hello}")


@dataclass(frozen=True)
class FailedRow:
    axis: str
    value: float
    variant: ProtocolVariant
    seed: int
    error: str


@dataclass(frozen=True)
class AggregateRow:
    axis: str
    value: float
    variant: ProtocolVariant
    seeds: int
    means: dict[str, float | None]
    stds: dict[str, float | None]


@dataclass(frozen=True)
class SweepResult:
    axis: str
    rows: tuple[SweepRow, ...]
    failures: tuple[FailedRow, ...]
    aggregates: tuple[AggregateRow, ...]


def apply_axis(base: ScenarioConfig, axis: str, value) -> ScenarioConfig:
    if axis == "speed":
        return replace(base, v_min=float(value), v_max=float(value))
    if axis == "flows":
        return replace(base, flow_pairs=int(value), flows=None)
    if axis == "nodes":
        return replace(base, node_count=int(value), flows=None)
    raise ConfigError(f"unknown sweep axis {axis!r}; pick one of {AXES}")


def _run_job(args) -> tuple[int, SweepRow | FailedRow]:
    idx, base, axis, value, variant, seed = args
    try:
        cfg = replace(apply_axis(base, axis, value), variant=variant, seed=seed)
        report = run_scenario(cfg)
        return idx, SweepRow.from_report(axis, value, variant, seed, report)
    except (ConfigError, ValueError) as exc:
        return idx, FailedRow(axis=axis, value=float(value), variant=variant,
                              seed=seed, error=str(exc))


def run_sweep(base: ScenarioConfig, axis: str, values, variants, seeds,
              workers: int = 1, progress=None) -> SweepResult:
    """Run the full (value, variant, seed) grid and aggregate per (value, variant)."""
    values = list(values)
    variants = list(variants)
    seeds = list(seeds)
    if not values or not variants or not seeds:
        raise ConfigError("sweep needs at least one value, variant and seed")
    jobs = [(i, base, axis, value, variant, seed)
            for i, (value, variant, seed) in enumerate(
                (v, p, s) for v in values for p in variants for s in seeds)]
    results: list = [None] * len(jobs)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for idx, outcome in pool.map(_run_job, jobs, chunksize=1):
                results[idx] = outcome
                if progress is not None:
                    progress(outcome)
    else:
        for job in jobs:
            idx, outcome = _run_job(job)
            results[idx] = outcome
            if progress is not None:
                progress(outcome)
    rows = tuple(r for r in results if isinstance(r, SweepRow))
    failures = tuple(r for r in results if isinstance(r, FailedRow))
    return SweepResult(axis=axis, rows=rows, failures=failures,
                       aggregates=tuple(aggregate(rows)))


_METRICS = ("generated", "delivered", "pdr", "nrl", "avg_delay_s",
            "rreq", "rrep", "rerr", "hello")


def _metric_value(row: SweepRow, name: str):
    return getattr(row, name)


def aggregate(rows) -> list[AggregateRow]:
    """Per-(value, variant) mean and population standard deviation over seeds."""
    groups: dict[tuple[float, ProtocolVariant], list[SweepRow]] = {}
    for row in rows:
        groups.setdefault((row.value, row.variant), []).append(row)
    out = []
    for (value, variant), members in groups.items():
        means: dict[str, float | None] = {}
        stds: dict[str, float | None] = {}
        for name in _METRICS:
            vals = [_metric_value(m, name) for m in members]
            if any(v is None for v in vals):
                means[name] = None
                stds[name] = None
            else:
                means[name] = statistics.fmean(vals)
                stds[name] = statistics.pstdev(vals)
        out.append(AggregateRow(axis=members[0].axis, value=value, variant=variant,
                                seeds=len(members), means=means, stds=stds))
    return out


def _fmt(x) -> str:
    if x is None:
        return "nan"
    return repr(float(x)) if isinstance(x, float) else str(x)


def emit_results(result: SweepResult, out_dir: str | Path) -> tuple[Path, Path]:
    """Write per-run rows and per-(value, variant) aggregates as CSV files."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows_path = out_dir / "results.csv"
    agg_path = out_dir / "aggregate.csv"
    with open(rows_path, "w") as fh:
        fh.write(ROW_HEADER + "\n")
        for row in result.rows:
            fh.write(row.csv_line() + "\n")
    with open(agg_path, "w") as fh:
        names = [n for n in _METRICS]
        header = "axis_value,variant,seeds," + ",".join(
            f"{n}_mean,{n}_std" for n in names)
        fh.write(header + "\n")
        for agg in result.aggregates:
            cells = [_fmt(agg.value), agg.variant.value, str(agg.seeds)]
            for n in names:
                cells.append(_fmt(agg.means[n]))
                cells.append(_fmt(agg.stds[n]))
            fh.write(",".join(cells) + "\n")
    return rows_path, agg_path
