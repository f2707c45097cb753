"""Tag clouds: top-k selection, cloud operations, and quality metrics.

A tag pairs a composite term (the coordinate values joined for display)
with a non-negative weight. Entropy over the normalized weights tells
whether a cloud has visually dominant tags (low entropy) or is a wash of
near-equal ones; the false-positive and false-negative indexes compare
an approximate cloud against the exact one, each reporting the heaviest
wrongly-included (resp. missing) tag's weight relative to the heaviest
tag on its own side.

Ties are broken everywhere by lexicographic coordinate order so results
are reproducible.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable

from .cube import Cuboid
from .errors import AllZeroWeights, EmptyCloud, SingletonCloud

TERM_SEPARATOR = "–"  # en dash, as in "Canada–March"
DEFAULT_MAX_TAGS = 150  # display guideline; overridable everywhere


def make_term(coords: tuple[str, ...]) -> str:
    return TERM_SEPARATOR.join(coords)


@dataclass(frozen=True)
class Tag:
    """A (term, object, weight) triplet; identity is the coordinate tuple."""

    term: str
    coords: tuple[str, ...]
    weight: float

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError(f"tag weight must be non-negative, got {self.weight}")

    @classmethod
    def from_cell(cls, coords: tuple[str, ...], weight) -> "Tag":
        return cls(term=make_term(coords), coords=tuple(coords), weight=weight)


@dataclass(frozen=True)
class TagCloud:
    """An ordered, finite collection of tags with pairwise-distinct coords."""

    tags: tuple[Tag, ...]
    source_dims: tuple[str, ...]
    approximate: bool = False
    max_tags: int | None = None

    def __post_init__(self):
        coords = [t.coords for t in self.tags]
        if len(set(coords)) != len(coords):
            raise ValueError("tag coordinates must be pairwise distinct")
        if self.max_tags is not None and len(self.tags) > self.max_tags:
            raise ValueError(f"cloud holds {len(self.tags)} tags, cap is {self.max_tags}")

    def __len__(self) -> int:
        return len(self.tags)

    def __iter__(self):
        return iter(self.tags)

    def coord_set(self) -> set[tuple[str, ...]]:
        return {t.coords for t in self.tags}

    def weights(self) -> list[float]:
        return [t.weight for t in self.tags]


def _ranked(items) -> list:
    """Descending weight, lexicographic coords on ties."""
    return sorted(items, key=lambda kv: (-kv[1], kv[0]))


def top_k(cuboid: Cuboid, k: int, *, approximate: bool = False) -> TagCloud:
    """The k largest-weight cells as tags, ordered by descending weight.

    Fewer than k cells yields them all; an empty cuboid yields an empty
    cloud. Deterministic under ties (lexicographic coords).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    best = heapq.nsmallest(k, cuboid.cells.items(), key=lambda kv: (-kv[1], kv[0]))
    tags = tuple(Tag.from_cell(coords, weight) for coords, weight in best)
    return TagCloud(tags=tags, source_dims=cuboid.dims, approximate=approximate)


def entropy(cloud: TagCloud) -> float:
    """Shannon entropy (natural log) of the normalized tag weights,
    with 0*log(0) taken as 0."""
    total = sum(t.weight for t in cloud.tags)
    if total <= 0:
        raise AllZeroWeights("entropy needs at least one positive weight")
    h = 0.0
    for t in cloud.tags:
        if t.weight > 0:
            p = t.weight / total
            h -= p * math.log(p)
    return h


def relative_entropy(cloud: TagCloud) -> float:
    """Entropy divided by log of the cloud size, in [0, 1]."""
    if len(cloud) < 2:
        raise SingletonCloud("relative entropy needs at least two tags")
    return entropy(cloud) / math.log(len(cloud))


def _max_weight(tags: Iterable[Tag]) -> float:
    return max(t.weight for t in tags)


def false_positive_index(approx: TagCloud, exact: TagCloud) -> float:
    """Heaviest approximate tag absent from the exact cloud, relative to
    the heaviest approximate tag. 0 is ideal; weights come from the
    approximate side."""
    if not approx.tags:
        raise EmptyCloud("false-positive index needs a non-empty approximate cloud")
    exact_coords = exact.coord_set()
    wrong = [t for t in approx.tags if t.coords not in exact_coords]
    if not wrong:
        return 0.0
    denom = _max_weight(approx.tags)
    if denom <= 0:
        return 0.0  # degenerate all-zero cloud; nothing is visually wrong
    return _max_weight(wrong) / denom


def false_negative_index(approx: TagCloud, exact: TagCloud) -> float:
    """Heaviest exact tag missing from the approximate cloud, relative to
    the heaviest exact tag; weights come from the exact side."""
    if not exact.tags:
        raise EmptyCloud("false-negative index needs a non-empty exact cloud")
    approx_coords = approx.coord_set()
    missing = [t for t in exact.tags if t.coords not in approx_coords]
    if not missing:
        return 0.0
    denom = _max_weight(exact.tags)
    if denom <= 0:
        return 0.0
    return _max_weight(missing) / denom


class SortKey(str, Enum):
    BY_WEIGHT_DESC = "BY_WEIGHT_DESC"
    BY_TERM_ASC = "BY_TERM_ASC"


def sort_tags(cloud: TagCloud, key: SortKey) -> TagCloud:
    """Stable reorder of the tags; the tag set is unchanged."""
    if key is SortKey.BY_WEIGHT_DESC:
        tags = tuple(sorted(cloud.tags, key=lambda t: -t.weight))
    else:
        tags = tuple(sorted(cloud.tags, key=lambda t: t.term))
    return replace(cloud, tags=tags)


def prune(
    cloud: TagCloud,
    *,
    remove_coords: Iterable[tuple[str, ...]] | None = None,
    keep_top: int | None = None,
    min_weight: float | None = None,
) -> TagCloud:
    """Drop tags by one criterion: an explicit coordinate set, everything
    below a rank (same tie-break as top_k), or everything below a weight."""
    chosen = [x is not None for x in (remove_coords, keep_top, min_weight)]
    if sum(chosen) != 1:
        raise ValueError("prune takes exactly one of remove_coords, keep_top, min_weight")
    if remove_coords is not None:
        doomed = {tuple(c) for c in remove_coords}
        tags = tuple(t for t in cloud.tags if t.coords not in doomed)
    elif keep_top is not None:
        if keep_top < 0:
            raise ValueError("keep_top must be >= 0")
        ranked = sorted(cloud.tags, key=lambda t: (-t.weight, t.coords))
        tags = tuple(ranked[:keep_top])
    else:
        tags = tuple(t for t in cloud.tags if t.weight >= min_weight)
    return replace(cloud, tags=tags)


def font_scale(
    cloud: TagCloud, min_size: float, max_size: float
) -> list[tuple[Tag, float]]:
    """Map the weight range linearly onto [min_size, max_size]. When all
    weights are equal every tag gets the midpoint size."""
    if not (0 < min_size <= max_size):
        raise ValueError(f"need 0 < min_size <= max_size, got [{min_size}, {max_size}]")
    if not cloud.tags:
        return []
    weights = cloud.weights()
    lo, hi = min(weights), max(weights)
    if hi == lo:
        mid = (min_size + max_size) / 2.0
        return [(t, mid) for t in cloud.tags]
    scale = (max_size - min_size) / (hi - lo)
    return [(t, min_size + (t.weight - lo) * scale) for t in cloud.tags]
