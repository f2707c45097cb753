"""Tag-to-tag similarity via subcuboid vectors.

Each tag has a subcuboid: slice the cuboid spanning the tag's own
dimensions plus the user-chosen clustering dimensions at the tag's
coordinates, and flatten what remains into a vector keyed by clustering
coordinates. Vectors of different tags cover different coordinates, so
all measures align them over the union of keys with missing entries
treated as zero.

Cosine and Tanimoto run on the raw values; Jaccard treats vectors as
support sets. On 0/1 vectors Tanimoto and Jaccard coincide exactly. All
three are reflexive and symmetric with values in [0, 1] for non-negative
inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .cloud import Tag, TagCloud
from .cube import (
    AggKind,
    Aggregator,
    apply_ops_to_cells,
    build_cuboid,
    project_cells,
    realize_cells,
    replay_ops,
)
from .errors import BothEmpty, OverlappingDims, UnknownDimension, ZeroVector
from .facts import FactTable, Schema
from .iceberg import IcebergCuboid


class SimilarityKind(str, Enum):
    COSINE = "COSINE"
    TANIMOTO = "TANIMOTO"
    JACCARD = "JACCARD"


@dataclass(frozen=True)
class TagVector:
    """A tag's flattened subcuboid: clustering coordinates to measures."""

    tag: Tag
    entries: Mapping[tuple[str, ...], float]

    def support(self) -> frozenset:
        return frozenset(k for k, v in self.entries.items() if v != 0)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.entries.values())


def _check_dims(schema: Schema, tag_dims, clustering_dims):
    overlap = set(tag_dims) & set(clustering_dims)
    if overlap:
        raise OverlappingDims(overlap)
    for d in (*tag_dims, *clustering_dims):
        if d not in schema.dimensions:
            raise UnknownDimension(d)


def tag_vector(
    table: FactTable,
    schema: Schema,
    tag_dims: Sequence[str],
    tag: Tag,
    clustering_dims: Sequence[str],
    agg: Aggregator,
) -> TagVector:
    """Exact subcuboid vector for one tag, computed from the facts."""
    tag_dims = tuple(tag_dims)
    clustering_dims = tuple(clustering_dims)
    _check_dims(schema, tag_dims, clustering_dims)
    joint = build_cuboid(table, schema, tag_dims + clustering_dims, agg)
    n = len(tag_dims)
    entries = {
        key[n:]: value
        for key, value in joint.cells.items()
        if key[:n] == tag.coords
    }
    return TagVector(tag=tag, entries=entries)


def _dot_and_norms(u: TagVector, v: TagVector) -> tuple[float, float, float]:
    dot = 0.0
    for k, a in u.entries.items():
        b = v.entries.get(k)
        if b is not None:
            dot += a * b
    nu = sum(a * a for a in u.entries.values())
    nv = sum(b * b for b in v.entries.values())
    return dot, nu, nv


def cosine(u: TagVector, v: TagVector) -> float:
    """Inner product over the union of keys, normalized."""
    if u.is_zero() or v.is_zero():
        raise ZeroVector("cosine needs a nonzero entry on both sides")
    dot, nu, nv = _dot_and_norms(u, v)
    return dot / math.sqrt(nu * nv)


def tanimoto(u: TagVector, v: TagVector) -> float:
    if u.is_zero() or v.is_zero():
        raise ZeroVector("Tanimoto needs a nonzero entry on both sides")
    dot, nu, nv = _dot_and_norms(u, v)
    return dot / (nu + nv - dot)


def jaccard(u: TagVector, v: TagVector) -> float:
    """Support-set overlap: |intersection| / |union|."""
    su, sv = u.support(), v.support()
    if not su and not sv:
        raise BothEmpty("Jaccard needs a nonzero entry somewhere")
    return len(su & sv) / len(su | sv)


class SimilarityMatrix:
    """Symmetric pairwise similarities with unit diagonal.

    similarity(i, j) counts lookups (see lookup_count) so the greedy
    chain's quadratic behavior can be asserted by measurement.
    """

    def __init__(self, tags: Sequence[Tag], values: np.ndarray, kind: SimilarityKind):
        n = len(tags)
        if values.shape != (n, n):
            raise ValueError(f"matrix shape {values.shape} does not match {n} tags")
        self.tags = tuple(tags)
        self.values = values
        self.kind = kind
        self.lookup_count = 0

    @property
    def n(self) -> int:
        return len(self.tags)

    def similarity(self, i: int, j: int) -> float:
        self.lookup_count += 1
        return float(self.values[i, j])

    def reset_lookup_count(self) -> None:
        self.lookup_count = 0


def matrix_from_vectors(
    tags: Sequence[Tag],
    vectors: Sequence[TagVector],
    kind: SimilarityKind,
) -> SimilarityMatrix:
    """Pairwise similarities of aligned vectors. Zero-vector tags get 0
    against everything and 1 to themselves."""
    n = len(tags)
    keys = sorted({k for vec in vectors for k in vec.entries})
    index = {k: i for i, k in enumerate(keys)}
    V = np.zeros((n, max(len(keys), 1)), dtype=float)
    for r, vec in enumerate(vectors):
        for k, val in vec.entries.items():
            V[r, index[k]] = val

    if kind is SimilarityKind.JACCARD:
        B = (V != 0).astype(float)
        inter = B @ B.T
        sizes = B.sum(axis=1)
        union = sizes[:, None] + sizes[None, :] - inter
        with np.errstate(invalid="ignore", divide="ignore"):
            S = np.where(union > 0, inter / np.where(union > 0, union, 1.0), 0.0)
    else:
        G = V @ V.T
        norms = np.einsum("ij,ij->i", V, V)
        if kind is SimilarityKind.COSINE:
            denom = np.sqrt(norms[:, None] * norms[None, :])
        else:
            denom = norms[:, None] + norms[None, :] - G
        with np.errstate(invalid="ignore", divide="ignore"):
            S = np.where(denom > 0, G / np.where(denom > 0, denom, 1.0), 0.0)

    S = (S + S.T) / 2.0
    S = np.clip(S, 0.0, 1.0)
    np.fill_diagonal(S, 1.0)
    return SimilarityMatrix(tags, S, kind)


def _vectors_from_cells(
    kind: AggKind,
    acc_cells: Mapping[tuple, object],
    dims: tuple[str, ...],
    tag_dims: tuple[str, ...],
    clustering_dims: tuple[str, ...],
    tags: Sequence[Tag],
) -> list[TagVector]:
    joint = project_cells(kind, acc_cells, dims, tag_dims + clustering_dims)
    realized = realize_cells(kind, joint)
    n = len(tag_dims)
    per_tag: dict[tuple, dict] = {t.coords: {} for t in tags}
    for key, value in realized.items():
        head = key[:n]
        bucket = per_tag.get(head)
        if bucket is not None:
            bucket[key[n:]] = value
    return [TagVector(tag=t, entries=per_tag[t.coords]) for t in tags]


def similarity_matrix(
    cloud: TagCloud,
    clustering_dims: Sequence[str],
    agg: Aggregator,
    kind: SimilarityKind,
    *,
    table: FactTable | None = None,
    schema: Schema | None = None,
    iceberg: IcebergCuboid | None = None,
    ops: tuple = (),
) -> SimilarityMatrix:
    """Pairwise similarities for a cloud's tags over the chosen clustering
    dimensions. Pass either (table, schema) for exact vectors or an
    iceberg to compute them from the retained cells only. `ops` replays
    the roll-ups and filters the cloud itself went through, so tags at a
    rolled-up level get vectors at that same level."""
    clustering_dims = tuple(clustering_dims)
    tag_dims = tuple(cloud.source_dims)
    overlap = set(tag_dims) & set(clustering_dims)
    if overlap:
        raise OverlappingDims(overlap)

    if iceberg is not None:
        kind_agg = iceberg.aggregator.kind
        dims0, cells0 = apply_ops_to_cells(
            kind_agg, iceberg.base_dims, iceberg.acc_cells, ops
        )
    elif table is not None and schema is not None:
        kind_agg = agg.kind
        if ops:
            dims0, cells0 = replay_ops(table, tuple(schema.dimensions), agg, tuple(ops))
        else:
            joint = build_cuboid(table, schema, tag_dims + clustering_dims, agg)
            dims0, cells0 = joint.dims, joint._acc
    else:
        raise ValueError("pass either table+schema or iceberg")

    for d in (*tag_dims, *clustering_dims):
        if d not in dims0:
            raise UnknownDimension(d)
    vectors = _vectors_from_cells(kind_agg, cells0, dims0, tag_dims, clustering_dims, cloud.tags)
    return matrix_from_vectors(cloud.tags, vectors, kind)
