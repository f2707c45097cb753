"""Cluster tags by how their subcuboids look and order them on a line so
similar tags sit together: greedy chaining, then seeded local search,
then the GLUED display hints a browser consumes.

Run:  python demos/04_similarity_and_layout.py
"""

from tagcube import (
    GLUED,
    Aggregator,
    SimilarityKind,
    build_cuboid,
    define_schema,
    emit_hints,
    ingest_csv,
    mla_cost,
    nn_order,
    pwmc_order,
    similarity_matrix,
    top_k,
)
from tagcube.layout import LayoutOrder

SALES = """\
location,time,salesman,product,cost,profit
Montreal,March,John,shoe,100,10
Montreal,December,Smith,shoe,150,30
Quebec,December,Smith,dress,175,45
Ontario,April,Kate,dress,90,10
Paris,March,John,shoe,100,20
Paris,March,Marc,table,120,10
Paris,June,Martin,shoe,120,5
Lyon,April,Claude,dress,90,10
New York,October,Joe,chair,100,10
New York,May,Joe,chair,90,10
Detroit,April,Jim,dress,90,10
"""

table = ingest_csv(SALES)
schema = define_schema(table, ["location", "time", "salesman", "product"], ["cost", "profit"])
cloud = top_k(build_cuboid(table, schema, ["location"], Aggregator.count()), 7)

# Each city's vector is its product mix; cities selling the same
# products come out similar.
m = similarity_matrix(
    cloud, ("product",), Aggregator.count(), SimilarityKind.COSINE,
    table=table, schema=schema,
)
print("pairwise cosine similarity over the product mix:")
header = "            " + "  ".join(f"{t.term[:8]:>8s}" for t in m.tags)
print(header)
for i, tag in enumerate(m.tags):
    row = "  ".join(f"{m.values[i, j]:8.3f}" for j in range(m.n))
    print(f"  {tag.term[:10]:10s} {row}")

baseline = LayoutOrder.identity(m.n)
print(f"\nweight order: {[m.tags[i].term for i in baseline.order]}")
print(f"  arrangement cost {mla_cost(baseline, m):.3f}")

chained = nn_order(m)
print(f"greedy chain: {[m.tags[i].term for i in chained.order]}")
print(f"  arrangement cost {mla_cost(chained, m):.3f}")

polished = pwmc_order(chained, m, exchanges=1000, seed=0)
print(f"after 1000 random exchange proposals: {[m.tags[i].term for i in polished.order]}")
print(f"  arrangement cost {mla_cost(polished, m):.3f} (never worse than its start)")

hints = emit_hints(polished, m, glue_threshold=0.9)
rendered = " ".join("+" if h == GLUED else h.term for h in hints)
print(f"\nwire form with GLUED hints at 0.9 ('+' marks glued neighbors):\n  {rendered}")
