"""Iceberg cuboids: answer cloud queries from the few largest cells of a
cube instead of rescanning every fact, and measure what that trade buys.

Run:  python demos/03_iceberg_approximation.py
"""

import time

from tagcube import (
    Aggregator,
    CloudQuery,
    ZipfSpec,
    approx_cloud,
    as_fact_table,
    exact_cloud,
    false_negative_index,
    false_positive_index,
    materialize_iceberg,
    relative_gain,
)
from tagcube.synth import default_schema

spec = ZipfSpec(dims=4, cardinalities=(20, 50, 500, 5000), rows=200_000, skew=1.2, seed=42)
table = as_fact_table(spec)
schema = default_schema(table)
print(f"synthetic cube: {table.row_count} facts, dims {schema.dimensions}")

agg = Aggregator.count()
t0 = time.perf_counter()
berg = materialize_iceberg(table, schema, schema.dimensions, agg, 150)
print(f"materialized a 150-cell iceberg in {time.perf_counter() - t0:.2f}s "
      f"(one-time cost, shared by every query)")

query = CloudQuery(group_dims=("dim4",), aggregator=agg, k=9)

t0 = time.perf_counter()
exact = exact_cloud(table, schema, query)
t_exact = time.perf_counter() - t0

t0 = time.perf_counter()
approx = approx_cloud(berg, query)
t_ice = time.perf_counter() - t0

print(f"\nexact top-9 over dim4:  {t_exact * 1000:7.2f} ms")
print(f"iceberg top-9 over dim4: {t_ice * 1000:7.2f} ms")
print(f"relative gain: {relative_gain(t_exact, t_ice):.4f}")

print("\n  exact              approximate")
for e, a in zip(exact, list(approx) + [None] * len(exact)):
    right = f"{a.term}:{a.weight:g}" if a else "(missing)"
    print(f"  {e.term}:{e.weight:<10g} {right}")
print("\napproximate weights undercount (dropped cells only remove mass),")
print("but the heavy tags survive:")
print(f"  false-positive index: {false_positive_index(approx, exact):.4f}")
print(f"  false-negative index: {false_negative_index(approx, exact):.4f}")

print("\ngrowing the limit only improves the answer:")
for limit in (150, 1200, 19600):
    shrunk = materialize_iceberg(table, schema, schema.dimensions, agg, limit)
    a = approx_cloud(shrunk, query)
    print(f"  limit {limit:6d}: fn index {false_negative_index(a, exact):.4f}")
