"""Walk through the cube engine: ingest a small sales table, group it,
then slice, dice, roll up and drill back down.

Run:  python demos/01_cubes_and_operations.py
"""

from tagcube import Aggregator, attach_hierarchy, build_cuboid, define_schema, ingest_csv

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

CITY_COUNTRY = {
    "Montreal": "Canada", "Quebec": "Canada", "Ontario": "Canada",
    "Paris": "France", "Lyon": "France",
    "New York": "USA", "Detroit": "USA",
}


def show(title, cuboid):
    print(f"\n{title}  (dims={', '.join(cuboid.dims) or 'none'})")
    for coords, value in sorted(cuboid.cells.items()):
        label = " / ".join(coords) if coords else "(all)"
        print(f"  {label:28s} {value:g}")


table = ingest_csv(SALES)
print(f"ingested {table.row_count} facts; inferred roles:")
for col in table.columns:
    print(f"  {col.name}: {col.kind.value.lower()}")

schema = define_schema(table, ["location", "time", "salesman", "product"], ["cost", "profit"])
schema = attach_hierarchy(table, schema, "location", "Country", CITY_COUNTRY)

by_city = build_cuboid(table, schema, ["location"], Aggregator.count())
show("facts per city", by_city)

by_city_product = build_cuboid(table, schema, ["location", "product"], Aggregator.sum("profit"))
show("profit per city and product", by_city_product)

show("profit for shoes only (slice drops the product dimension)",
     by_city_product.slice("product", "shoe"))

show("profit in March and April (dice keeps the time dimension)",
     build_cuboid(table, schema, ["time"], Aggregator.sum("profit")).dice("time", {"March", "April"}))

country = schema.hierarchy("location", "Country")
rolled = by_city.rollup("location", country)
show("facts per country (roll-up)", rolled)

show("drill back down to cities", rolled.drilldown("Country"))

# Filters picked at the country level survive the drill-down.
narrowed = rolled.dice("Country", {"Canada"})
show("only Canada, still at country level", narrowed)
show("drill-down keeps the Canada filter, now at city level",
     narrowed.drilldown("Country"))
