"""From cuboid to tag cloud: top-k selection, font scaling, entropy, and
the false-positive/false-negative indexes that score an approximation.

Run:  python demos/02_tag_clouds_and_quality.py
"""

from tagcube import (
    Aggregator,
    SortKey,
    build_cuboid,
    define_schema,
    entropy,
    false_negative_index,
    false_positive_index,
    font_scale,
    ingest_csv,
    prune,
    relative_entropy,
    sort_tags,
    top_k,
)

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
by_city = build_cuboid(table, schema, ["location"], Aggregator.count())

cloud = top_k(by_city, 7)
print("city cloud, heaviest first (ties break alphabetically):")
for tag, size in font_scale(cloud, 10, 40):
    bar = "#" * int(size / 2)
    print(f"  {tag.term:12s} weight {tag.weight:g}  font {size:5.1f}px  {bar}")

print(f"\nentropy: {entropy(cloud):.4f} (log scale; lower = more dominant tags)")
print(f"relative entropy: {relative_entropy(cloud):.4f} (1.0 would be perfectly uniform)")

alphabetical = sort_tags(cloud, SortKey.BY_TERM_ASC)
print("\nalphabetical view:", ", ".join(t.term for t in alphabetical))

trimmed = prune(cloud, min_weight=2)
print("tags weighing at least 2:", ", ".join(t.term for t in trimmed))

# Score a deliberately wrong approximation against the truth.
approx = prune(cloud, remove_coords={("New York",)})
exact = prune(cloud, keep_top=3)
print("\napprox cloud:", ", ".join(f"{t.term}:{t.weight:g}" for t in approx))
print("exact top-3: ", ", ".join(f"{t.term}:{t.weight:g}" for t in exact))
print(f"false-positive index: {false_positive_index(approx, exact):.4f}")
print(f"false-negative index: {false_negative_index(approx, exact):.4f}")
print("(0 is ideal; each index is the heaviest offending tag relative to the heaviest tag)")
