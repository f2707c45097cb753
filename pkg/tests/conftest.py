import random

import pytest

from tagcube import (
    Aggregator,
    Column,
    ColumnKind,
    FactTable,
    Schema,
    attach_hierarchy,
    define_schema,
    ingest_csv,
)
from tagcube.cube import AggKind

# An 11-row sales sample: 4 dimension columns, 2 measure columns, with
# repeated cities and a city -> country grouping. Small enough to check
# every aggregate by hand.
SAMPLE_SALES_CSV = """\
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
    "Montreal": "Canada",
    "Quebec": "Canada",
    "Ontario": "Canada",
    "Paris": "France",
    "Lyon": "France",
    "New York": "USA",
    "Detroit": "USA",
}


@pytest.fixture(scope="session")
def sales_table():
    return ingest_csv(SAMPLE_SALES_CSV)


@pytest.fixture(scope="session")
def sales_schema(sales_table):
    return define_schema(
        sales_table,
        ["location", "time", "salesman", "product"],
        ["cost", "profit"],
    )


@pytest.fixture(scope="session")
def sales_schema_with_country(sales_table, sales_schema):
    return attach_hierarchy(sales_table, sales_schema, "location", "Country", CITY_COUNTRY)


ALL_AGG_KINDS = tuple(AggKind)


def make_aggregator(kind: AggKind, measure: str = "m1") -> Aggregator:
    return Aggregator.count() if kind is AggKind.COUNT else Aggregator(kind, measure)


def random_fact_table(
    rng: random.Random,
    max_rows: int = 1000,
    max_dims: int = 4,
    max_card: int = 20,
    n_measures: int = 2,
    nonneg: bool = False,
) -> tuple[FactTable, Schema]:
    """A random table with small-integer measures so float aggregation is
    exact, plus a schema naming every column."""
    rows = rng.randint(1, max_rows)
    n_dims = rng.randint(1, max_dims)
    cards = [rng.randint(1, max_card) for _ in range(n_dims)]
    columns = []
    for d, card in enumerate(cards):
        values = tuple(f"v{rng.randint(1, card):03d}" for _ in range(rows))
        columns.append(Column(f"d{d + 1}", ColumnKind.DIMENSION, values))
    low = 0 if nonneg else -50
    for m in range(n_measures):
        values = tuple(float(rng.randint(low, 100)) for _ in range(rows))
        columns.append(Column(f"m{m + 1}", ColumnKind.MEASURE, values))
    table = FactTable(id=f"random-{rng.random():.12f}", columns=tuple(columns), row_count=rows)
    schema = Schema(
        dataset=table.id,
        dimensions=tuple(f"d{d + 1}" for d in range(n_dims)),
        measures=tuple(f"m{m + 1}" for m in range(n_measures)),
    )
    return table, schema
