"""Benchmark harnesses: iceberg quality/speed and layout heuristics.

Both harnesses emit plain CSV with a header row, ready for any plotting
tool, and keep the measured clouds on the row objects so the reported
quality indexes can be re-derived and audited. Timings use a monotonic
clock with repeated runs, median reported. Grid points are independent;
a worker pool can evaluate them concurrently, and rows are always
written in sorted key order so reports are reproducible.
"""

from __future__ import annotations

import csv
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .cloud import TagCloud, false_negative_index, false_positive_index, relative_entropy
from .cube import Aggregator
from .errors import TagCubeError
from .facts import FactTable, Schema
from .iceberg import approx_cloud, exact_cloud, materialize_iceberg, relative_gain
from .layout import LayoutOrder, mc_order, mla_cost, nn_order, pwmc_order
from .query import CloudQuery, LayoutKind
from .similarity import SimilarityKind, similarity_matrix


def _timed(fn, repetitions: int):
    """Median wall time over >= 1 runs, plus the last result."""
    times = []
    result = None
    for _ in range(max(1, repetitions)):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), result


# --- iceberg quality and speed ---------------------------------------------

ICEBERG_LIMITS = (150, 600, 1200, 4800, 19600)
CLOUD_SIZES = (50, 100, 150, 200)


@dataclass
class IcebergBenchRow:
    display_dim: str
    limit: int
    size: int
    relative_entropy: float | None
    fp_index: float
    fn_index: float
    t_exact: float
    t_iceberg: float
    relative_gain: float
    approx: TagCloud = field(repr=False, default=None)
    exact: TagCloud = field(repr=False, default=None)


def bench_iceberg(
    table: FactTable,
    schema: Schema,
    display_dims,
    limits=ICEBERG_LIMITS,
    sizes=CLOUD_SIZES,
    agg: Aggregator | None = None,
    repetitions: int = 3,
    workers: int = 1,
) -> list[IcebergBenchRow]:
    """For every (display dimension, iceberg limit, cloud size): quality
    indexes of the iceberg-approximated cloud against the exact one, and
    the wall-time gain. The iceberg covers all display dimensions at once
    and is shrunk per limit, mirroring one materialization serving every
    query."""
    display_dims = tuple(display_dims)
    limits = sorted(set(limits))
    sizes = sorted(set(sizes))
    agg = agg or Aggregator.count()

    base = materialize_iceberg(table, schema, display_dims, agg, max(limits))
    icebergs = {limit: base.shrink(limit) for limit in limits}

    def run_point(point) -> IcebergBenchRow:
        dim, limit, size = point
        query = CloudQuery(group_dims=(dim,), aggregator=agg, k=size)
        t_exact, exact = _timed(lambda: exact_cloud(table, schema, query), repetitions)
        berg = icebergs[limit]
        t_ice, approx = _timed(lambda: approx_cloud(berg, query), repetitions)
        try:
            rel_h = relative_entropy(approx)
        except TagCubeError:
            rel_h = None
        return IcebergBenchRow(
            display_dim=dim,
            limit=limit,
            size=size,
            relative_entropy=rel_h,
            fp_index=false_positive_index(approx, exact) if approx.tags else 1.0,
            fn_index=false_negative_index(approx, exact) if exact.tags else 0.0,
            t_exact=t_exact,
            t_iceberg=t_ice,
            relative_gain=relative_gain(t_exact, t_ice),
            approx=approx,
            exact=exact,
        )

    points = [(d, l, s) for d in display_dims for l in limits for s in sizes]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_point, points))
    else:
        rows = [run_point(p) for p in points]
    rows.sort(key=lambda r: (r.display_dim, r.limit, r.size))
    return rows


def write_iceberg_report(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            [
                "display_dim",
                "limit",
                "size",
                "relative_entropy",
                "fp_index",
                "fn_index",
                "t_exact",
                "t_iceberg",
                "relative_gain",
            ]
        )
        for r in rows:
            w.writerow(
                [
                    r.display_dim,
                    r.limit,
                    r.size,
                    "" if r.relative_entropy is None else repr(r.relative_entropy),
                    repr(r.fp_index),
                    repr(r.fn_index),
                    repr(r.t_exact),
                    repr(r.t_iceberg),
                    repr(r.relative_gain),
                ]
            )


# --- layout heuristics ------------------------------------------------------

@dataclass(frozen=True)
class HeuristicSpec:
    kind: LayoutKind
    budget: int = 0  # exchanges for PWMC, iterations for MC

    @property
    def label(self) -> str:
        if self.kind is LayoutKind.NN:
            return "NN"
        return f"{self.kind.value}({self.budget})"

    @classmethod
    def parse(cls, text: str) -> "HeuristicSpec":
        name, _, budget = text.partition(":")
        kind = LayoutKind(name.upper())
        if kind is LayoutKind.NN:
            return cls(kind)
        return cls(kind, int(budget) if budget else 1000)


DEFAULT_HEURISTICS = (
    HeuristicSpec(LayoutKind.NN),
    HeuristicSpec(LayoutKind.PWMC, 10),
    HeuristicSpec(LayoutKind.PWMC, 100),
    HeuristicSpec(LayoutKind.PWMC, 1000),
    HeuristicSpec(LayoutKind.MC, 1000),
)

GAIN_THRESHOLDS = (0.0, 0.3, 0.7, 0.9)


@dataclass
class LayoutBenchRow:
    display_dim: str
    clustering_dim: str
    measure: str
    heuristic: str
    n_tags: int
    baseline_cost: float
    cost: float
    gain: float
    t_seconds: float


def bench_layout(
    table: FactTable,
    schema: Schema,
    measure_kinds=(SimilarityKind.COSINE, SimilarityKind.TANIMOTO),
    heuristics=DEFAULT_HEURISTICS,
    iceberg_limit: int = 150,
    size: int = 150,
    agg: Aggregator | None = None,
    seed: int = 0,
    repetitions: int = 3,
    workers: int = 1,
) -> list[LayoutBenchRow]:
    """Every dimension in turn is displayed as 1-tags and every other
    dimension used to cluster it; each heuristic's arrangement cost is
    compared against the weight-sorted baseline order. Similarities come
    from an iceberg over the (display, clustering) pair."""
    agg = agg or Aggregator.count()
    dims = tuple(schema.dimensions)
    pairs = [(d, c) for d in dims for c in dims if c != d]

    def run_pair(pair) -> list[LayoutBenchRow]:
        display, clustering = pair
        berg = materialize_iceberg(table, schema, (display, clustering), agg, iceberg_limit)
        cloud = approx_cloud(berg, CloudQuery(group_dims=(display,), aggregator=agg, k=size))
        if len(cloud) < 2:
            return []
        out = []
        for kind in measure_kinds:
            m = similarity_matrix(cloud, (clustering,), agg, kind, iceberg=berg)
            baseline = LayoutOrder.identity(m.n)  # the weight-sorted cloud order
            base_cost = mla_cost(baseline, m)
            for h in heuristics:
                def run(h=h):
                    nn = nn_order(m)  # PWMC and MC both start from the greedy chain
                    if h.kind is LayoutKind.NN:
                        return nn
                    if h.kind is LayoutKind.PWMC:
                        return pwmc_order(nn, m, h.budget, seed)
                    return mc_order(nn, m, h.budget, seed)

                t, order = _timed(run, repetitions)
                cost = mla_cost(order, m)
                gain = (base_cost - cost) / base_cost if base_cost > 0 else 0.0
                out.append(
                    LayoutBenchRow(
                        display_dim=display,
                        clustering_dim=clustering,
                        measure=kind.value,
                        heuristic=h.label,
                        n_tags=m.n,
                        baseline_cost=base_cost,
                        cost=cost,
                        gain=gain,
                        t_seconds=t,
                    )
                )
        return out

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run_pair, pairs))
    else:
        chunks = [run_pair(p) for p in pairs]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r.display_dim, r.clustering_dim, r.measure, r.heuristic))
    return rows


def layout_summary(rows) -> dict[str, dict]:
    """Per heuristic: cloud counts whose gain beats each threshold, plus
    mean wall time. The shape of the classic comparison table."""
    summary: dict[str, dict] = {}
    for row in rows:
        entry = summary.setdefault(
            row.heuristic,
            {"clouds": 0, "mean_time": 0.0, **{f"gain>{int(t * 100)}%": 0 for t in GAIN_THRESHOLDS}},
        )
        entry["clouds"] += 1
        entry["mean_time"] += row.t_seconds
        for t in GAIN_THRESHOLDS:
            if row.gain > t:
                entry[f"gain>{int(t * 100)}%"] += 1
    for entry in summary.values():
        if entry["clouds"]:
            entry["mean_time"] /= entry["clouds"]
    return summary


def write_layout_report(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            [
                "display_dim",
                "clustering_dim",
                "measure",
                "heuristic",
                "n_tags",
                "baseline_cost",
                "cost",
                "gain",
                "t_seconds",
            ]
        )
        for r in rows:
            w.writerow(
                [
                    r.display_dim,
                    r.clustering_dim,
                    r.measure,
                    r.heuristic,
                    r.n_tags,
                    repr(r.baseline_cost),
                    repr(r.cost),
                    repr(r.gain),
                    repr(r.t_seconds),
                ]
            )
