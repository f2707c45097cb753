"""Interactive multidimensional tag clouds over ad-hoc data cubes.

The pipeline: ingest delimited data into an immutable fact table, choose
dimensions and measures, aggregate into cuboids, keep only the largest
cells as an iceberg for fast approximate top-k queries, render the top
cells as a weighted tag cloud, and optionally order the tags so similar
ones sit together.
"""

from .cloud import (
    DEFAULT_MAX_TAGS,
    SortKey,
    Tag,
    TagCloud,
    entropy,
    false_negative_index,
    false_positive_index,
    font_scale,
    prune,
    relative_entropy,
    sort_tags,
    top_k,
)
from .cube import AggKind, Aggregator, Cuboid, build_cuboid
from .errors import TagCubeError
from .facts import (
    Column,
    ColumnKind,
    DatasetRegistry,
    FactTable,
    Hierarchy,
    IngestOptions,
    Schema,
    attach_hierarchy,
    define_schema,
    ingest_csv,
    read_hierarchy_csv,
)
from .iceberg import (
    IcebergCuboid,
    approx_cloud,
    exact_cloud,
    materialize_iceberg,
    relative_gain,
)
from .layout import (
    GLUED,
    PERMUTABLE,
    LayoutOrder,
    brute_force_order,
    emit_hints,
    mc_order,
    mla_cost,
    nn_order,
    pwmc_order,
)
from .query import CloudQuery, Filter, FilterOp, LayoutKind, LayoutSpec, RollupSpec
from .similarity import (
    SimilarityKind,
    SimilarityMatrix,
    TagVector,
    cosine,
    jaccard,
    matrix_from_vectors,
    similarity_matrix,
    tag_vector,
    tanimoto,
)
from .synth import ZipfSpec, as_fact_table, to_csv_text, write_csv

__version__ = "0.1.0"

__all__ = [
    "AggKind",
    "Aggregator",
    "CloudQuery",
    "Column",
    "ColumnKind",
    "Cuboid",
    "DEFAULT_MAX_TAGS",
    "DatasetRegistry",
    "FactTable",
    "Filter",
    "FilterOp",
    "GLUED",
    "Hierarchy",
    "IcebergCuboid",
    "IngestOptions",
    "LayoutKind",
    "LayoutOrder",
    "LayoutSpec",
    "PERMUTABLE",
    "RollupSpec",
    "Schema",
    "SimilarityKind",
    "SimilarityMatrix",
    "SortKey",
    "Tag",
    "TagCloud",
    "TagCubeError",
    "TagVector",
    "ZipfSpec",
    "approx_cloud",
    "as_fact_table",
    "attach_hierarchy",
    "brute_force_order",
    "build_cuboid",
    "cosine",
    "define_schema",
    "emit_hints",
    "entropy",
    "exact_cloud",
    "false_negative_index",
    "false_positive_index",
    "font_scale",
    "ingest_csv",
    "jaccard",
    "materialize_iceberg",
    "matrix_from_vectors",
    "mc_order",
    "mla_cost",
    "nn_order",
    "prune",
    "pwmc_order",
    "read_hierarchy_csv",
    "relative_entropy",
    "relative_gain",
    "similarity_matrix",
    "sort_tags",
    "tag_vector",
    "tanimoto",
    "to_csv_text",
    "top_k",
    "write_csv",
]
