"""Iceberg cuboids: the `limit` largest cells of a cuboid, kept in memory
as the substrate for approximate tag-cloud queries.

One iceberg is materialized per (dimensions, aggregator) at the finest
requested granularity; subsequent queries that roll up, filter, or group
by a dimension subset are answered by re-aggregating the retained cells,
never touching the facts again. Dropped cells can only remove mass, so
for additive aggregators every approximate weight is a lower bound on
the exact one. When `limit` covers every cell the approximation is the
exact answer.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import cached_property

from .cloud import TagCloud, top_k
from .cube import (
    AggKind,
    Aggregator,
    Cuboid,
    DiceOp,
    Op,
    Provenance,
    RollupOp,
    SliceOp,
    apply_ops_to_cells,
    build_cuboid,
    project_cells,
    realize_acc,
    realize_cells,
    replay_ops,
)
from .errors import (
    DimensionNotInIceberg,
    NonPositiveBaseline,
    UnknownDimension,
    UnknownHierarchy,
)
from .facts import FactTable, Schema
from .query import CloudQuery, FilterOp


def _rank_key(kind: AggKind):
    return lambda kv: (-realize_acc(kind, kv[1]), kv[0])


@dataclass(frozen=True)
class IcebergCuboid:
    """The top-`limit` cells of a cuboid, ranked by realized value with
    lexicographic coordinate tie-break."""

    base_dims: tuple[str, ...]
    limit: int
    aggregator: Aggregator
    acc_cells: dict
    table: FactTable
    schema: Schema

    def __len__(self) -> int:
        return len(self.acc_cells)

    @cached_property
    def cells(self) -> dict:
        return realize_cells(self.aggregator.kind, self.acc_cells)

    def shrink(self, limit: int) -> "IcebergCuboid":
        """A smaller iceberg over the same cuboid. The top-`limit` of the
        retained cells equals the top-`limit` of the full cuboid whenever
        limit <= self.limit, so no recomputation is needed."""
        if limit > self.limit:
            raise ValueError(f"cannot grow an iceberg from {self.limit} to {limit}")
        kept = heapq.nsmallest(limit, self.acc_cells.items(), key=_rank_key(self.aggregator.kind))
        return IcebergCuboid(
            base_dims=self.base_dims,
            limit=limit,
            aggregator=self.aggregator,
            acc_cells=dict(kept),
            table=self.table,
            schema=self.schema,
        )


def materialize_iceberg(
    table: FactTable,
    schema: Schema,
    dims,
    agg: Aggregator,
    limit: int,
) -> IcebergCuboid:
    """Build the cuboid over `dims` and retain its `limit` largest cells."""
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    cuboid = build_cuboid(table, schema, dims, agg)
    kept = heapq.nsmallest(limit, cuboid._acc.items(), key=_rank_key(agg.kind))
    return IcebergCuboid(
        base_dims=cuboid.dims,
        limit=limit,
        aggregator=agg,
        acc_cells=dict(kept),
        table=table,
        schema=schema,
    )


def resolve_ops(schema: Schema, query: CloudQuery) -> tuple[Op, ...]:
    """Turn the query's declarative rollups and filters into engine ops:
    rollups first, then filters in list order."""
    ops: list[Op] = []
    for spec in query.rollups:
        h = schema.hierarchy(spec.child, spec.parent)
        if h is None:
            raise UnknownHierarchy(spec.child, spec.parent)
        ops.append(RollupOp(hierarchy=h))
    for f in query.filters:
        via = None
        if f.via is not None:
            via = schema.hierarchy(f.dim, f.via)
            if via is None:
                raise UnknownHierarchy(f.dim, f.via)
        if f.op is FilterOp.SLICE:
            ops.append(SliceOp(dim=f.dim, value=f.values[0], via=via))
        else:
            ops.append(DiceOp(dim=f.dim, values=frozenset(f.values), via=via))
    return tuple(ops)


def _effective_dims(base_dims: tuple[str, ...], ops: tuple[Op, ...]) -> tuple[str, ...]:
    dims = list(base_dims)
    for op in ops:
        if isinstance(op, RollupOp):
            i = dims.index(op.hierarchy.child_dimension)
            dims[i] = op.hierarchy.parent_name
        elif isinstance(op, SliceOp):
            dims.remove(op.dim)
    return tuple(dims)


def approx_cloud(iceberg: IcebergCuboid, query: CloudQuery) -> TagCloud:
    """Answer a cloud query from the retained cells alone: apply the
    query's rollups and filters to the cells, re-aggregate down to the
    display dimensions, and take the top k. Always flagged approximate."""
    schema = iceberg.schema
    ops = resolve_ops(schema, query)

    # Validate every referenced dimension against what the iceberg holds.
    available = list(iceberg.base_dims)
    for op in ops:
        if isinstance(op, RollupOp):
            child = op.hierarchy.child_dimension
            if child not in available:
                raise DimensionNotInIceberg(child)
            available[available.index(child)] = op.hierarchy.parent_name
        elif isinstance(op, SliceOp):
            if op.dim not in available:
                raise DimensionNotInIceberg(op.dim)
            available.remove(op.dim)
        else:
            if op.dim not in available:
                raise DimensionNotInIceberg(op.dim)
    for d in query.group_dims:
        if d not in available:
            raise DimensionNotInIceberg(d)

    kind = iceberg.aggregator.kind
    dims, cells = apply_ops_to_cells(kind, iceberg.base_dims, iceberg.acc_cells, ops)
    projected = project_cells(kind, cells, dims, query.group_dims)
    view = Cuboid(
        query.group_dims,
        iceberg.aggregator,
        projected,
        Provenance(table=iceberg.table, schema=schema, base_dims=iceberg.base_dims, ops=ops),
    )
    return top_k(view, query.k, approximate=True)


def _needed_base_dims(schema: Schema, query: CloudQuery, ops: tuple[Op, ...]) -> tuple[str, ...]:
    """The base columns the exact computation actually has to read:
    whatever the grouping and every op touch, tracked through renames."""
    base_of = {d: d for d in schema.dimensions}
    needed: set[str] = set()
    for op in ops:
        if isinstance(op, RollupOp):
            child, parent = op.hierarchy.child_dimension, op.hierarchy.parent_name
            if child not in base_of:
                raise UnknownDimension(child)
            base_of[parent] = base_of.pop(child)
            needed.add(base_of[parent])
        else:
            if op.dim not in base_of:
                raise UnknownDimension(op.dim)
            needed.add(base_of[op.dim])
    for d in query.group_dims:
        if d not in base_of:
            raise UnknownDimension(d)
        needed.add(base_of[d])
    return tuple(d for d in schema.dimensions if d in needed)


def exact_cloud(table: FactTable, schema: Schema, query: CloudQuery) -> TagCloud:
    """Ground-truth cloud computed from all facts; the oracle for the
    quality indexes. Groups at the requested granularity rather than the
    finest one, so its timing is a fair exact baseline."""
    ops = resolve_ops(schema, query)
    base_dims = _needed_base_dims(schema, query, ops)
    dims, cells = replay_ops(table, base_dims, query.aggregator, ops)
    kind = query.aggregator.kind
    projected = project_cells(kind, cells, dims, query.group_dims)
    view = Cuboid(
        query.group_dims,
        query.aggregator,
        projected,
        Provenance(table=table, schema=schema, base_dims=base_dims, ops=ops),
    )
    return top_k(view, query.k, approximate=False)


def relative_gain(t_exact: float, t_iceberg: float) -> float:
    """Fractional speedup of the iceberg path over the exact one; negative
    when the approximation is slower."""
    if t_exact <= 0:
        raise NonPositiveBaseline(f"exact time must be positive, got {t_exact}")
    return (t_exact - t_iceberg) / t_exact
