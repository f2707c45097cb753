"""Fact tables, user-defined schemas, and roll-up hierarchies.

Users bring their own delimited data with no predeclared schema: columns
are typed at ingest (all-numeric columns default to measures, everything
else to dimensions, overridable per column) and the resulting table is
immutable. Hierarchies are flat child-to-parent value maps supplied by
the user, either inline or as a two-column CSV; nothing is assumed to
pre-exist in the data.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import threading
import uuid
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Mapping

from .errors import (
    ConflictingMapping,
    DuplicateColumnName,
    EmptyDimensionSet,
    EmptyInput,
    EmptyMeasureSet,
    IncompleteMapping,
    NonNumericMeasure,
    OverlappingRoles,
    RaggedRows,
    UnknownColumn,
    UnknownDataset,
    UnknownDimension,
    WrongColumnKind,
)


class ColumnKind(str, Enum):
    DIMENSION = "DIMENSION"
    MEASURE = "MEASURE"


@dataclass(frozen=True)
class Column:
    """One named column: string cells for dimensions, floats for measures."""

    name: str
    kind: ColumnKind
    values: tuple

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class FactTable:
    """Immutable columnar store of dimension values and numeric measures.

    The id is a content hash, so ingesting identical bytes with identical
    options yields an equal table.
    """

    id: str
    columns: tuple[Column, ...]
    row_count: int

    def __post_init__(self):
        seen = set()
        for col in self.columns:
            if col.name in seen:
                raise DuplicateColumnName(col.name)
            seen.add(col.name)
            if len(col) != self.row_count:
                raise ValueError(
                    f"column {col.name!r} has {len(col)} cells, table has {self.row_count} rows"
                )

    def column(self, name: str) -> Column:
        for col in self.columns:
            if col.name == name:
                return col
        raise UnknownColumn(name)

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def names_of_kind(self, kind: ColumnKind) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns if c.kind is kind)

    def distinct_values(self, name: str) -> set:
        return set(self.column(name).values)


@dataclass(frozen=True)
class Hierarchy:
    """Flat child-to-parent map over one dimension's attribute values."""

    child_dimension: str
    parent_name: str
    mapping: Mapping[str, str]


@dataclass(frozen=True)
class Schema:
    """User-chosen dimension/measure roles plus any attached hierarchies."""

    dataset: str
    dimensions: tuple[str, ...]
    measures: tuple[str, ...]
    hierarchies: tuple[Hierarchy, ...] = ()

    def hierarchy(self, child: str, parent: str) -> Hierarchy | None:
        for h in self.hierarchies:
            if h.child_dimension == child and h.parent_name == parent:
                return h
        return None


@dataclass(frozen=True)
class IngestOptions:
    """Knobs for CSV ingest.

    measure_hint overrides the inferred kind per column name. When
    missing_measure_default is None (the default), an empty cell in a
    measure column rejects the whole file; otherwise the cell takes the
    given value. Empty dimension cells are always kept as the literal
    empty string, a valid attribute value.
    """

    delimiter: str = ","
    header_row: bool = True
    measure_hint: Mapping[str, ColumnKind] | None = None
    missing_measure_default: float | None = None


def _parse_number(cell: str) -> float | None:
    text = cell.strip()
    if not text:
        return None
    try:
        value = float(text)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def ingest_csv(data: bytes | str, options: IngestOptions | None = None) -> FactTable:
    """Parse RFC-4180-style delimited text into an immutable fact table.

    Columns whose every cell parses as a finite number default to
    MEASURE, all others to DIMENSION; options.measure_hint overrides per
    column. Deterministic: identical bytes and options produce an equal
    table (the id is a content hash).
    """
    options = options or IngestOptions()
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    if not text.strip():
        raise EmptyInput("no data")

    rows = list(csv.reader(io.StringIO(text), delimiter=options.delimiter))
    rows = [r for r in rows if r]  # csv yields [] for blank lines
    if not rows:
        raise EmptyInput("no rows")

    if options.header_row:
        names = [name.strip() for name in rows[0]]
        data_rows = rows[1:]
    else:
        names = [f"col{i + 1}" for i in range(len(rows[0]))]
        data_rows = rows

    seen: set[str] = set()
    for name in names:
        if name in seen:
            raise DuplicateColumnName(name)
        seen.add(name)

    width = len(names)
    for i, row in enumerate(data_rows, start=1):
        if len(row) != width:
            raise RaggedRows(row=i, expected=width, got=len(row))

    hints = dict(options.measure_hint or {})
    for hinted in hints:
        if hinted not in seen:
            raise UnknownColumn(hinted)

    columns = []
    for j, name in enumerate(names):
        cells = [row[j] for row in data_rows]
        parsed = [_parse_number(c) for c in cells]
        inferred = (
            ColumnKind.MEASURE
            if cells and all(p is not None for p in parsed)
            else ColumnKind.DIMENSION
        )
        kind = hints.get(name, inferred)
        if kind is ColumnKind.MEASURE:
            values = []
            for i, (cell, p) in enumerate(zip(cells, parsed), start=1):
                if p is None:
                    if not cell.strip() and options.missing_measure_default is not None:
                        p = options.missing_measure_default
                    else:
                        raise NonNumericMeasure(column=name, row=i, cell=cell)
                values.append(p)
            columns.append(Column(name, ColumnKind.MEASURE, tuple(values)))
        else:
            columns.append(Column(name, ColumnKind.DIMENSION, tuple(cells)))

    digest = hashlib.sha256()
    digest.update(text.encode("utf-8"))
    digest.update(
        repr(
            (options.delimiter, options.header_row, sorted(hints.items()), options.missing_measure_default)
        ).encode("utf-8")
    )
    return FactTable(id=digest.hexdigest()[:16], columns=tuple(columns), row_count=len(data_rows))


def define_schema(table: FactTable, dims: Iterable[str], measures: Iterable[str]) -> Schema:
    """Designate dimension and measure columns; both sets must be non-empty."""
    dims = tuple(dims)
    measures = tuple(measures)
    if not dims:
        raise EmptyDimensionSet("a schema needs at least one dimension")
    if not measures:
        raise EmptyMeasureSet("a schema needs at least one measure")
    overlap = set(dims) & set(measures)
    if overlap:
        raise OverlappingRoles(overlap)
    for name in (*dims, *measures):
        table.column(name)  # raises UnknownColumn
    for name in dims:
        col = table.column(name)
        if col.kind is not ColumnKind.DIMENSION:
            raise WrongColumnKind(name, wanted="dimension", got=col.kind.value.lower())
    for name in measures:
        col = table.column(name)
        if col.kind is not ColumnKind.MEASURE:
            raise WrongColumnKind(name, wanted="measure", got=col.kind.value.lower())
    return Schema(dataset=table.id, dimensions=dims, measures=measures)


def attach_hierarchy(
    table: FactTable,
    schema: Schema,
    child: str,
    parent_name: str,
    mapping: Mapping[str, str],
) -> Schema:
    """Return a new schema with a child-to-parent hierarchy appended.

    The mapping must cover every distinct value of the child column;
    extra keys are harmless. The input schema is unchanged.
    """
    if child not in schema.dimensions:
        raise UnknownDimension(child)
    if parent_name in table.column_names:
        raise DuplicateColumnName(parent_name)
    uncovered = table.distinct_values(child) - set(mapping)
    if uncovered:
        raise IncompleteMapping(uncovered)
    hierarchy = Hierarchy(child_dimension=child, parent_name=parent_name, mapping=dict(mapping))
    return replace(schema, hierarchies=schema.hierarchies + (hierarchy,))


def read_hierarchy_csv(data: bytes | str, delimiter: str = ",") -> dict[str, str]:
    """Read a two-column (child_value, parent_value) CSV into a mapping."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    if not text.strip():
        raise EmptyInput("no mapping rows")
    mapping: dict[str, str] = {}
    for i, row in enumerate(csv.reader(io.StringIO(text), delimiter=delimiter), start=1):
        if not row:
            continue
        if len(row) != 2:
            raise RaggedRows(row=i, expected=2, got=len(row))
        child, parent = row
        if child in mapping and mapping[child] != parent:
            raise ConflictingMapping(child, [mapping[child], parent])
        mapping[child] = parent
    return mapping


class DatasetRegistry:
    """In-memory id-to-table registry: exclusive writes, concurrent reads.

    Tables are immutable, so readers never see partial state; the lock
    only serializes writers. Persistence is out of scope.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._tables: dict[str, FactTable] = {}

    def add(self, table: FactTable, dataset_id: str | None = None) -> str:
        dataset_id = dataset_id or uuid.uuid4().hex[:12]
        with self._lock:
            self._tables[dataset_id] = table
        return dataset_id

    def get(self, dataset_id: str) -> FactTable:
        try:
            return self._tables[dataset_id]
        except KeyError:
            raise UnknownDataset(dataset_id) from None

    def __contains__(self, dataset_id: str) -> bool:
        return dataset_id in self._tables

    def ids(self) -> tuple[str, ...]:
        return tuple(self._tables)
