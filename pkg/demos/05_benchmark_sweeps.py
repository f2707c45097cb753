"""Run scaled-down versions of the two benchmark sweeps and print their
headline numbers. The full grids are available through the CLI
(bench-iceberg, bench-layout) and write plain CSV for plotting.

Run:  python demos/05_benchmark_sweeps.py
"""

from tagcube import ZipfSpec, as_fact_table
from tagcube.bench import (
    HeuristicSpec,
    bench_iceberg,
    bench_layout,
    layout_summary,
)
from tagcube.query import LayoutKind
from tagcube.similarity import SimilarityKind
from tagcube.synth import default_schema

spec = ZipfSpec(dims=4, cardinalities=(20, 50, 200, 800), rows=30_000, skew=1.2, seed=7)
table = as_fact_table(spec)
schema = default_schema(table)
print(f"cube: {table.row_count} facts over {schema.dimensions}\n")

print("== iceberg sweep: quality and speed per (dimension, limit, size) ==")
rows = bench_iceberg(
    table, schema, schema.dimensions,
    limits=[150, 1200, 19600], sizes=[20, 50], repetitions=1,
)
print(f"{'dim':6s} {'limit':>6s} {'size':>4s} {'rel.entropy':>11s} {'fp':>7s} {'fn':>7s} {'gain':>7s}")
for r in rows:
    rel = f"{r.relative_entropy:.3f}" if r.relative_entropy is not None else "-"
    print(f"{r.display_dim:6s} {r.limit:6d} {r.size:4d} {rel:>11s} "
          f"{r.fp_index:7.4f} {r.fn_index:7.4f} {r.relative_gain:7.3f}")

print("\n== layout sweep: every dimension displayed, every other used to cluster ==")
layout_rows = bench_layout(
    table, schema,
    measure_kinds=(SimilarityKind.COSINE,),
    heuristics=(
        HeuristicSpec(LayoutKind.NN),
        HeuristicSpec(LayoutKind.PWMC, 100),
        HeuristicSpec(LayoutKind.PWMC, 1000),
        HeuristicSpec(LayoutKind.MC, 1000),
    ),
    iceberg_limit=150,
    size=50,
    repetitions=1,
)
print(f"{'heuristic':12s} {'clouds':>6s} {'gain>0%':>8s} {'gain>30%':>9s} {'gain>70%':>9s} {'gain>90%':>9s} {'mean time':>10s}")
for heuristic, stats in layout_summary(layout_rows).items():
    print(f"{heuristic:12s} {stats['clouds']:6d} {stats['gain>0%']:8d} {stats['gain>30%']:9d} "
          f"{stats['gain>70%']:9d} {stats['gain>90%']:9d} {stats['mean_time']:9.4f}s")
print("\n(gain is the arrangement-cost reduction against the weight-sorted order)")
