"""Seeded Zipf-distributed fact generator for benchmarks.

Each dimension column draws its values independently from a truncated
Zipf distribution over that dimension's cardinality (skew 0 is uniform).
A constant placeholder measure column is appended so the table satisfies
schemas that require one; COUNT ignores it. Same spec and seed, same
bytes.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .facts import Column, ColumnKind, FactTable, Schema

MEASURE_COLUMN = "unit"


@dataclass(frozen=True)
class ZipfSpec:
    dims: int
    cardinalities: tuple[int, ...]
    rows: int
    skew: float
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "cardinalities", tuple(self.cardinalities))
        if self.dims < 1:
            raise ValueError("need at least one dimension")
        if len(self.cardinalities) != self.dims:
            raise ValueError(
                f"{self.dims} dimensions but {len(self.cardinalities)} cardinalities"
            )
        if any(c < 1 for c in self.cardinalities):
            raise ValueError("cardinalities must be >= 1")
        if self.rows < 1:
            raise ValueError("need at least one row")
        if self.skew < 0:
            raise ValueError("skew must be >= 0")

    def dim_names(self) -> tuple[str, ...]:
        return tuple(f"dim{i + 1}" for i in range(self.dims))


def zipf_pmf(cardinality: int, skew: float) -> np.ndarray:
    """P(rank r) proportional to r**-skew over ranks 1..cardinality."""
    ranks = np.arange(1, cardinality + 1, dtype=float)
    weights = ranks ** -skew
    return weights / weights.sum()


def generate_columns(spec: ZipfSpec) -> list[list[str]]:
    """One list of value strings per dimension. Values are 'v0001'-style,
    zero-padded so lexicographic order equals rank order."""
    rng = np.random.default_rng(spec.seed)
    columns = []
    for card in spec.cardinalities:
        pmf = zipf_pmf(card, spec.skew)
        ranks = rng.choice(card, size=spec.rows, p=pmf) + 1
        width = len(str(card))
        columns.append([f"v{r:0{width}d}" for r in ranks])
    return columns


def as_fact_table(spec: ZipfSpec) -> FactTable:
    """Build the table in memory, skipping the CSV round-trip."""
    dim_values = generate_columns(spec)
    columns = [
        Column(name, ColumnKind.DIMENSION, tuple(values))
        for name, values in zip(spec.dim_names(), dim_values)
    ]
    columns.append(Column(MEASURE_COLUMN, ColumnKind.MEASURE, (1.0,) * spec.rows))
    return FactTable(id=f"zipf-{spec.seed}-{spec.rows}", columns=tuple(columns), row_count=spec.rows)


def default_schema(table: FactTable) -> Schema:
    dims = table.names_of_kind(ColumnKind.DIMENSION)
    measures = table.names_of_kind(ColumnKind.MEASURE)
    return Schema(dataset=table.id, dimensions=dims, measures=measures)


def to_csv_text(spec: ZipfSpec) -> str:
    dim_values = generate_columns(spec)
    names = spec.dim_names()
    out = io.StringIO()
    out.write(",".join((*names, MEASURE_COLUMN)) + "\n")
    for r in range(spec.rows):
        out.write(",".join(col[r] for col in dim_values) + ",1\n")
    return out.getvalue()


def write_csv(spec: ZipfSpec, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(to_csv_text(spec))
