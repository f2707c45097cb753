"""Exception types raised by the engine.

Everything derives from :class:`TagCubeError` so callers (CLI, HTTP
service) can catch one base class and map it to an exit code or status.
"""

from __future__ import annotations


class TagCubeError(Exception):
    """Base class for all engine errors."""


# --- ingest ---------------------------------------------------------------

class EmptyInput(TagCubeError):
    """The uploaded byte stream contains no data at all."""


class RaggedRows(TagCubeError):
    """A data row has the wrong number of fields; the whole file is rejected."""

    def __init__(self, row: int, expected: int, got: int):
        self.row = row
        self.expected = expected
        self.got = got
        super().__init__(f"row {row} has {got} fields, expected {expected}")


class DuplicateColumnName(TagCubeError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"duplicate column name: {name!r}")


class NonNumericMeasure(TagCubeError):
    """A cell in a measure column does not parse as a finite number."""

    def __init__(self, column: str, row: int, cell: str):
        self.column = column
        self.row = row
        self.cell = cell
        super().__init__(f"measure column {column!r}, row {row}: {cell!r} is not a finite number")


# --- schema ---------------------------------------------------------------

class UnknownColumn(TagCubeError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"no such column: {name!r}")


class OverlappingRoles(TagCubeError):
    """The same column was named both as a dimension and as a measure."""

    def __init__(self, names):
        self.names = tuple(sorted(names))
        super().__init__(f"columns named as both dimension and measure: {', '.join(self.names)}")


class EmptyDimensionSet(TagCubeError):
    """A schema or cuboid needs at least one dimension."""


class EmptyMeasureSet(TagCubeError):
    """A schema needs at least one measure column."""


class WrongColumnKind(TagCubeError):
    def __init__(self, name: str, wanted: str, got: str):
        self.name = name
        super().__init__(f"column {name!r} is {got}, but the schema names it as {wanted}")


class UnknownDimension(TagCubeError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"no such dimension: {name!r}")


class UnknownMeasure(TagCubeError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"no such measure: {name!r}")


class IncompleteMapping(TagCubeError):
    """A hierarchy mapping leaves some attribute values uncovered."""

    def __init__(self, uncovered):
        self.uncovered = tuple(sorted(uncovered))
        shown = ", ".join(self.uncovered[:5])
        more = "" if len(self.uncovered) <= 5 else f" (+{len(self.uncovered) - 5} more)"
        super().__init__(f"mapping does not cover: {shown}{more}")


class ConflictingMapping(TagCubeError):
    """A hierarchy file maps the same child value to two different parents."""

    def __init__(self, child: str, parents):
        self.child = child
        super().__init__(f"child value {child!r} mapped to multiple parents: {sorted(parents)}")


class UnknownHierarchy(TagCubeError):
    def __init__(self, child: str, parent: str):
        self.child = child
        self.parent = parent
        super().__init__(f"no hierarchy {child!r} -> {parent!r} attached to the schema")


# --- cube operations ------------------------------------------------------

class HierarchyMismatch(TagCubeError):
    """The hierarchy passed to a roll-up does not apply to the named dimension."""


class NoFinerLevel(TagCubeError):
    """Drill-down asked on a base column that was never rolled up."""

    def __init__(self, dim: str):
        self.dim = dim
        super().__init__(f"dimension {dim!r} is already at base granularity")


class EmptyValueSet(TagCubeError):
    """A dice needs a non-empty set of attribute values."""


# --- tag clouds -----------------------------------------------------------

class AllZeroWeights(TagCubeError):
    """Entropy is undefined when every tag weight is zero."""


class SingletonCloud(TagCubeError):
    """Relative entropy needs at least two tags (log of cloud size is zero)."""


class EmptyCloud(TagCubeError):
    """Quality indexes need a non-empty cloud on the measured side."""


# --- iceberg --------------------------------------------------------------

class DimensionNotInIceberg(TagCubeError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"dimension {name!r} is not covered by the materialized iceberg")


class NonPositiveBaseline(TagCubeError):
    """Relative gain needs a positive exact-computation time."""


# --- similarity and layout ------------------------------------------------

class OverlappingDims(TagCubeError):
    """Clustering dimensions must be disjoint from the tag's own dimensions."""

    def __init__(self, names):
        self.names = tuple(sorted(names))
        super().__init__(f"dimensions used on both sides: {', '.join(self.names)}")


class ZeroVector(TagCubeError):
    """Cosine and Tanimoto are undefined when a vector has no nonzero entry."""


class BothEmpty(TagCubeError):
    """Jaccard is undefined when both supports are empty."""


class PermutationMismatch(TagCubeError):
    """A layout order does not form a permutation of the matrix's tags."""


class TooLarge(TagCubeError):
    """Exhaustive layout search is guarded against factorial blowup."""

    def __init__(self, n: int, limit: int):
        super().__init__(f"brute force layout is capped at {limit} tags, got {n}")


# --- registry -------------------------------------------------------------

class UnknownDataset(TagCubeError):
    def __init__(self, dataset_id: str):
        self.dataset_id = dataset_id
        super().__init__(f"no such dataset: {dataset_id!r}")
