"""Cuboids and the conventional OLAP operations over them.

A cuboid is one group-by view of a fact table: a sparse map from
coordinate tuples (one attribute value per grouping dimension) to an
aggregated measure. Slice, dice and roll-up derive new cuboids by
transforming cells; drill-down recomputes from the base facts recorded
in the cuboid's provenance, replaying the whole operation pipeline at
the finer granularity.

Average cells carry a (sum, count) pair internally, so re-aggregation
under roll-up is exact rather than an average of averages; min and max
combine as min/max, count and sum add. Because every accumulator
composes, the incremental cell-level operations agree exactly with a
recomputation from facts (the test suite checks this against a
nested-loop oracle).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    EmptyDimensionSet,
    EmptyValueSet,
    HierarchyMismatch,
    IncompleteMapping,
    NoFinerLevel,
    UnknownDimension,
    UnknownMeasure,
)
from .facts import FactTable, Hierarchy, Schema


class AggKind(str, Enum):
    COUNT = "COUNT"
    SUM = "SUM"
    AVERAGE = "AVERAGE"
    MIN = "MIN"
    MAX = "MAX"


@dataclass(frozen=True)
class Aggregator:
    """An aggregation operator, plus its target measure except for COUNT."""

    kind: AggKind
    measure: str | None = None

    def __post_init__(self):
        if self.kind is AggKind.COUNT:
            object.__setattr__(self, "measure", None)  # COUNT ignores the measure name
        elif self.measure is None:
            raise ValueError(f"{self.kind.value} needs a measure column")

    @classmethod
    def count(cls) -> "Aggregator":
        return cls(AggKind.COUNT)

    @classmethod
    def sum(cls, measure: str) -> "Aggregator":
        return cls(AggKind.SUM, measure)

    @classmethod
    def average(cls, measure: str) -> "Aggregator":
        return cls(AggKind.AVERAGE, measure)

    @classmethod
    def min(cls, measure: str) -> "Aggregator":
        return cls(AggKind.MIN, measure)

    @classmethod
    def max(cls, measure: str) -> "Aggregator":
        return cls(AggKind.MAX, measure)


# Accumulators: COUNT -> int, SUM/MIN/MAX -> number, AVERAGE -> (sum, count).

def init_acc(kind: AggKind, mval):
    if kind is AggKind.COUNT:
        return 1
    if kind is AggKind.AVERAGE:
        return (mval, 1)
    return mval


def merge_acc(kind: AggKind, a, b):
    if kind is AggKind.COUNT:
        return a + b
    if kind is AggKind.SUM:
        return a + b
    if kind is AggKind.MIN:
        return a if a <= b else b
    if kind is AggKind.MAX:
        return a if a >= b else b
    return (a[0] + b[0], a[1] + b[1])


def realize_acc(kind: AggKind, acc):
    if kind is AggKind.AVERAGE:
        return acc[0] / acc[1]
    return acc


def realize_cells(kind: AggKind, acc_cells: Mapping[tuple, object]) -> dict:
    return {k: realize_acc(kind, v) for k, v in acc_cells.items()}


def project_cells(
    kind: AggKind,
    acc_cells: Mapping[tuple, object],
    src_dims: tuple[str, ...],
    dst_dims: tuple[str, ...],
) -> dict:
    """Re-aggregate cells onto a subset (or reordering) of their dimensions."""
    idx = []
    for d in dst_dims:
        if d not in src_dims:
            raise UnknownDimension(d)
        idx.append(src_dims.index(d))
    out: dict[tuple, object] = {}
    for key, acc in acc_cells.items():
        sub = tuple(key[i] for i in idx)
        prev = out.get(sub)
        out[sub] = acc if prev is None else merge_acc(kind, prev, acc)
    return out


# --- operation pipeline ----------------------------------------------------
#
# Every cuboid records the ops that produced it so drill-down can replay
# them from the base facts. A `via` hierarchy on a filter means "compare
# the value's image under the hierarchy", which lets a filter stated at a
# coarse level survive a drill-down to the finer level.

@dataclass(frozen=True)
class SliceOp:
    dim: str
    value: str
    via: Hierarchy | None = None


@dataclass(frozen=True)
class DiceOp:
    dim: str
    values: frozenset
    via: Hierarchy | None = None


@dataclass(frozen=True)
class RollupOp:
    hierarchy: Hierarchy


Op = SliceOp | DiceOp | RollupOp


@dataclass(frozen=True)
class Provenance:
    table: FactTable
    schema: Schema
    base_dims: tuple[str, ...]
    ops: tuple[Op, ...] = ()


def _mapped(value: str, hierarchy: Hierarchy | None) -> str:
    if hierarchy is None:
        return value
    try:
        return hierarchy.mapping[value]
    except KeyError:
        raise IncompleteMapping([value]) from None


def apply_ops_to_cells(
    kind: AggKind,
    dims: tuple[str, ...],
    acc_cells: Mapping[tuple, object],
    ops: Iterable[Op],
) -> tuple[tuple[str, ...], dict]:
    """Run slice/dice/rollup ops directly on cells. Exact for all
    supported aggregators because accumulators compose."""
    dims = tuple(dims)
    cells = dict(acc_cells)
    for op in ops:
        if isinstance(op, RollupOp):
            h = op.hierarchy
            if h.child_dimension not in dims:
                raise UnknownDimension(h.child_dimension)
            i = dims.index(h.child_dimension)
            if h.parent_name in dims:
                raise HierarchyMismatch(
                    f"parent level {h.parent_name!r} collides with an existing dimension"
                )
            missing = {k[i] for k in cells} - set(h.mapping)
            if missing:
                raise IncompleteMapping(missing)
            out: dict[tuple, object] = {}
            for key, acc in cells.items():
                nk = key[:i] + (h.mapping[key[i]],) + key[i + 1:]
                prev = out.get(nk)
                out[nk] = acc if prev is None else merge_acc(kind, prev, acc)
            cells = out
            dims = dims[:i] + (h.parent_name,) + dims[i + 1:]
        elif isinstance(op, SliceOp):
            if op.dim not in dims:
                raise UnknownDimension(op.dim)
            i = dims.index(op.dim)
            cells = {
                key[:i] + key[i + 1:]: acc
                for key, acc in cells.items()
                if _mapped(key[i], op.via) == op.value
            }
            dims = dims[:i] + dims[i + 1:]
        else:  # DiceOp
            if op.dim not in dims:
                raise UnknownDimension(op.dim)
            i = dims.index(op.dim)
            cells = {
                key: acc for key, acc in cells.items() if _mapped(key[i], op.via) in op.values
            }
    return dims, cells


def replay_ops(
    table: FactTable,
    base_dims: tuple[str, ...],
    agg: Aggregator,
    ops: tuple[Op, ...],
) -> tuple[tuple[str, ...], dict]:
    """Recompute cells from the base facts, applying the op pipeline row
    by row. This is the ground-truth evaluation drill-down relies on."""
    kind = agg.kind
    dim_cols = [table.column(d).values for d in base_dims]
    measure = (
        table.column(agg.measure).values if kind is not AggKind.COUNT else None
    )

    # Resolve, per op, the index of the dimension it touches at that
    # point of the pipeline, so the row loop does no name lookups.
    dims = list(base_dims)
    plan: list[tuple] = []
    for op in ops:
        if isinstance(op, RollupOp):
            h = op.hierarchy
            if h.child_dimension not in dims:
                raise UnknownDimension(h.child_dimension)
            i = dims.index(h.child_dimension)
            if h.parent_name in dims:
                raise HierarchyMismatch(
                    f"parent level {h.parent_name!r} collides with an existing dimension"
                )
            plan.append(("roll", i, h.mapping))
            dims[i] = h.parent_name
        elif isinstance(op, SliceOp):
            if op.dim not in dims:
                raise UnknownDimension(op.dim)
            i = dims.index(op.dim)
            plan.append(("slice", i, op.value, op.via.mapping if op.via else None))
            del dims[i]
        else:
            if op.dim not in dims:
                raise UnknownDimension(op.dim)
            i = dims.index(op.dim)
            plan.append(("dice", i, op.values, op.via.mapping if op.via else None))

    cells: dict[tuple, object] = {}
    for r in range(table.row_count):
        values = [col[r] for col in dim_cols]
        keep = True
        for step in plan:
            if step[0] == "roll":
                _, i, mapping = step
                try:
                    values[i] = mapping[values[i]]
                except KeyError:
                    raise IncompleteMapping([values[i]]) from None
            elif step[0] == "slice":
                _, i, want, via = step
                v = values[i]
                if via is not None:
                    try:
                        v = via[v]
                    except KeyError:
                        raise IncompleteMapping([v]) from None
                if v != want:
                    keep = False
                    break
                del values[i]
            else:
                _, i, wanted, via = step
                v = values[i]
                if via is not None:
                    try:
                        v = via[v]
                    except KeyError:
                        raise IncompleteMapping([v]) from None
                if v not in wanted:
                    keep = False
                    break
        if not keep:
            continue
        key = tuple(values)
        acc = init_acc(kind, measure[r] if measure is not None else None)
        prev = cells.get(key)
        cells[key] = acc if prev is None else merge_acc(kind, prev, acc)
    return tuple(dims), cells


class Cuboid:
    """One aggregated multidimensional view, immutable after construction."""

    def __init__(
        self,
        dims: tuple[str, ...],
        aggregator: Aggregator,
        acc_cells: dict,
        provenance: Provenance,
    ):
        self.dims = tuple(dims)
        self.aggregator = aggregator
        self._acc = acc_cells
        self.provenance = provenance

    @cached_property
    def cells(self) -> dict:
        """Realized cell values (averages collapsed to a single number)."""
        return realize_cells(self.aggregator.kind, self._acc)

    def __len__(self) -> int:
        return len(self._acc)

    def __repr__(self) -> str:
        return f"Cuboid(dims={self.dims}, agg={self.aggregator.kind.value}, cells={len(self)})"

    def _derive(self, op: Op) -> "Cuboid":
        dims, cells = apply_ops_to_cells(self.aggregator.kind, self.dims, self._acc, [op])
        prov = replace(self.provenance, ops=self.provenance.ops + (op,))
        return Cuboid(dims, self.aggregator, cells, prov)

    def slice(self, dim: str, value: str) -> "Cuboid":
        """Keep cells whose coordinate on `dim` equals `value`; the
        dimension leaves the coordinate. A value matching nothing yields
        an empty cuboid, not an error."""
        if dim not in self.dims:
            raise UnknownDimension(dim)
        return self._derive(SliceOp(dim=dim, value=value))

    def dice(self, dim: str, values: Iterable[str]) -> "Cuboid":
        """Keep cells whose coordinate on `dim` is in `values`; the
        dimension stays."""
        if dim not in self.dims:
            raise UnknownDimension(dim)
        values = frozenset(values)
        if not values:
            raise EmptyValueSet("dice needs at least one value")
        return self._derive(DiceOp(dim=dim, values=values))

    def rollup(self, dim: str, hierarchy: Hierarchy) -> "Cuboid":
        """Re-aggregate to the coarser attribute values of `hierarchy`,
        replacing `dim` with the hierarchy's parent level."""
        if dim not in self.dims:
            raise UnknownDimension(dim)
        if hierarchy.child_dimension != dim:
            raise HierarchyMismatch(
                f"hierarchy maps {hierarchy.child_dimension!r}, not {dim!r}"
            )
        return self._derive(RollupOp(hierarchy=hierarchy))

    def drilldown(self, parent_dim: str) -> "Cuboid":
        """Reverse the roll-up that produced `parent_dim`, recomputing
        from the base facts while preserving every recorded filter.
        Filters stated on the parent level are rewritten to compare the
        child's image under the hierarchy, so they keep selecting the
        same facts at the finer granularity."""
        if parent_dim not in self.dims:
            raise UnknownDimension(parent_dim)
        ops = self.provenance.ops
        target = None
        for idx in range(len(ops) - 1, -1, -1):
            op = ops[idx]
            if isinstance(op, RollupOp) and op.hierarchy.parent_name == parent_dim:
                target = idx
                break
        if target is None:
            raise NoFinerLevel(parent_dim)

        hierarchy = ops[target].hierarchy
        child = hierarchy.child_dimension
        new_ops: list[Op] = list(ops[:target])
        for op in ops[target + 1:]:
            if isinstance(op, SliceOp) and op.dim == parent_dim:
                new_ops.append(SliceOp(dim=child, value=op.value, via=hierarchy))
            elif isinstance(op, DiceOp) and op.dim == parent_dim:
                new_ops.append(DiceOp(dim=child, values=op.values, via=hierarchy))
            else:
                new_ops.append(op)

        prov = self.provenance
        dims, cells = replay_ops(prov.table, prov.base_dims, self.aggregator, tuple(new_ops))
        return Cuboid(dims, self.aggregator, cells, replace(prov, ops=tuple(new_ops)))


def build_cuboid(
    table: FactTable,
    schema: Schema,
    dims: Iterable[str],
    agg: Aggregator,
) -> Cuboid:
    """Group the facts by `dims` and aggregate. Sparse: only coordinate
    tuples that occur in the data get a cell."""
    dims = tuple(dims)
    if not dims:
        raise EmptyDimensionSet("a cuboid needs at least one grouping dimension")
    for d in dims:
        if d not in schema.dimensions:
            raise UnknownDimension(d)
    if agg.kind is not AggKind.COUNT and agg.measure not in schema.measures:
        raise UnknownMeasure(agg.measure)

    kind = agg.kind
    dim_cols = [table.column(d).values for d in dims]
    cells: dict[tuple, object] = {}
    if kind is AggKind.COUNT:
        for key in zip(*dim_cols) if dim_cols else ():
            cells[key] = cells.get(key, 0) + 1
    else:
        measure = table.column(agg.measure).values
        if kind is AggKind.SUM:
            for key, m in zip(zip(*dim_cols), measure):
                cells[key] = cells.get(key, 0.0) + m
        elif kind is AggKind.AVERAGE:
            for key, m in zip(zip(*dim_cols), measure):
                prev = cells.get(key)
                cells[key] = (m, 1) if prev is None else (prev[0] + m, prev[1] + 1)
        elif kind is AggKind.MIN:
            for key, m in zip(zip(*dim_cols), measure):
                prev = cells.get(key)
                cells[key] = m if prev is None or m < prev else prev
        else:
            for key, m in zip(zip(*dim_cols), measure):
                prev = cells.get(key)
                cells[key] = m if prev is None or m > prev else prev

    return Cuboid(dims, agg, cells, Provenance(table=table, schema=schema, base_dims=dims))
