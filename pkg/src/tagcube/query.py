"""Declarative cloud queries, shared by the iceberg engine, the HTTP
service, and the CLI.

A query names the display dimensions, the aggregation, an ordered filter
list, roll-ups to coarser levels, the cloud size k, and (optionally) the
clustering dimensions plus a layout heuristic. Roll-ups are applied
first, then filters in list order, then the grouping down to the display
dimensions. A filter may carry a `via` parent level, in which case it
compares each value's image under that hierarchy: this is how a filter
picked at a coarse level (click on a country) keeps selecting the same
facts after drilling down to cities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .cloud import DEFAULT_MAX_TAGS
from .cube import Aggregator


class FilterOp(str, Enum):
    SLICE = "SLICE"
    DICE = "DICE"


@dataclass(frozen=True)
class Filter:
    op: FilterOp
    dim: str
    values: tuple[str, ...]
    via: str | None = None  # parent level name; compare mapping[value] instead of value

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if self.op is FilterOp.SLICE and len(self.values) != 1:
            raise ValueError("a slice filter takes exactly one value")
        if self.op is FilterOp.DICE and not self.values:
            raise ValueError("a dice filter needs at least one value")


@dataclass(frozen=True)
class RollupSpec:
    """Reference to a hierarchy attached to the schema, by (child, parent)."""

    child: str
    parent: str


class LayoutKind(str, Enum):
    NONE = "NONE"
    NN = "NN"
    PWMC = "PWMC"
    MC = "MC"


@dataclass(frozen=True)
class LayoutSpec:
    kind: LayoutKind = LayoutKind.NONE
    exchanges: int = 1000  # PWMC proposal budget
    iterations: int = 1000  # MC proposal budget
    glue_threshold: float = 0.8

    def __post_init__(self):
        if self.exchanges < 0 or self.iterations < 0:
            raise ValueError("layout budgets must be >= 0")


@dataclass(frozen=True)
class CloudQuery:
    group_dims: tuple[str, ...]
    aggregator: Aggregator
    filters: tuple[Filter, ...] = ()
    rollups: tuple[RollupSpec, ...] = ()
    k: int = DEFAULT_MAX_TAGS
    clustering_dims: tuple[str, ...] = ()
    similarity: str | None = None  # a SimilarityKind value, when clustering
    layout: LayoutSpec = field(default_factory=LayoutSpec)
    iceberg_limit: int | None = None  # None = exact computation
    seed: int = 0
    font_min: float = 10.0
    font_max: float = 40.0

    def __post_init__(self):
        object.__setattr__(self, "group_dims", tuple(self.group_dims))
        object.__setattr__(self, "filters", tuple(self.filters))
        object.__setattr__(self, "rollups", tuple(self.rollups))
        object.__setattr__(self, "clustering_dims", tuple(self.clustering_dims))
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not self.group_dims:
            raise ValueError("a query needs at least one display dimension")
        if self.iceberg_limit is not None and self.iceberg_limit < 1:
            raise ValueError("iceberg_limit must be >= 1")
