"""HTTP facade: datasets, schemas, cloud queries, permalinks, embeds.

The JSON wire format is the only interface clients get; all aggregation
and layout math stays server-side and the browser receives an ordered,
already-sized tag list with optional GLUED tokens. Permalinks capture
the rendered response bytes, not a live query, so shared views never
drift as data changes. Icebergs are materialized lazily on first use and
cached per (dataset, schema version, dimensions, aggregator, limit) with
single-flight semantics: a concurrent identical request gets 409 and may
simply retry.
"""

from __future__ import annotations

import hashlib
import html
import json
import os
import threading
import time
from dataclasses import asdict, dataclass

from fastapi import FastAPI, HTTPException, Request, Response

from .cloud import DEFAULT_MAX_TAGS, entropy, font_scale, relative_entropy
from .cube import Aggregator, AggKind
from .errors import TagCubeError, UnknownDataset
from .facts import (
    ColumnKind,
    DatasetRegistry,
    FactTable,
    IngestOptions,
    Schema,
    attach_hierarchy,
    define_schema,
    ingest_csv,
)
from .iceberg import (
    IcebergCuboid,
    approx_cloud,
    exact_cloud,
    materialize_iceberg,
    resolve_ops,
)
from .layout import GLUED, emit_hints, mc_order, mla_cost, nn_order, pwmc_order
from .query import CloudQuery, Filter, FilterOp, LayoutKind, LayoutSpec, RollupSpec
from .similarity import SimilarityKind, similarity_matrix


# --- query parsing ----------------------------------------------------------

def parse_cloud_query(payload: dict) -> CloudQuery:
    """Build a CloudQuery from a JSON body; raises ValueError on any
    malformed field so the HTTP layer can answer 422."""
    if not isinstance(payload, dict):
        raise ValueError("query body must be a JSON object")

    agg_spec = payload.get("aggregator", {"kind": "COUNT"})
    if isinstance(agg_spec, str):
        agg_spec = {"kind": agg_spec}
    try:
        kind = AggKind(str(agg_spec.get("kind", "COUNT")).upper())
    except ValueError:
        raise ValueError(f"unknown aggregator kind: {agg_spec.get('kind')!r}")
    aggregator = Aggregator(kind, agg_spec.get("measure"))

    filters = []
    for f in payload.get("filters", ()):
        filters.append(
            Filter(
                op=FilterOp(str(f["op"]).upper()),
                dim=f["dim"],
                values=tuple(f.get("values", ())),
                via=f.get("via"),
            )
        )
    rollups = [RollupSpec(child=r["child"], parent=r["parent"]) for r in payload.get("rollups", ())]

    layout_spec = payload.get("layout", {"kind": "NONE"})
    if isinstance(layout_spec, str):
        layout_spec = {"kind": layout_spec}
    layout = LayoutSpec(
        kind=LayoutKind(str(layout_spec.get("kind", "NONE")).upper()),
        exchanges=int(layout_spec.get("exchanges", 1000)),
        iterations=int(layout_spec.get("iterations", 1000)),
        glue_threshold=float(layout_spec.get("glue_threshold", 0.8)),
    )

    similarity = payload.get("similarity")
    if similarity is not None:
        similarity = SimilarityKind(str(similarity).upper()).value

    return CloudQuery(
        group_dims=tuple(payload.get("group_dims", ())),
        aggregator=aggregator,
        filters=tuple(filters),
        rollups=tuple(rollups),
        k=int(payload.get("k", DEFAULT_MAX_TAGS)),
        clustering_dims=tuple(payload.get("clustering_dims", ())),
        similarity=similarity,
        layout=layout,
        iceberg_limit=payload.get("iceberg_limit"),
        seed=int(payload.get("seed", 0)),
        font_min=float(payload.get("font_min", 10.0)),
        font_max=float(payload.get("font_max", 40.0)),
    )


def canonical_query_json(query: CloudQuery) -> str:
    blob = asdict(query)
    blob["aggregator"] = {"kind": query.aggregator.kind.value, "measure": query.aggregator.measure}
    blob["layout"] = {
        "kind": query.layout.kind.value,
        "exchanges": query.layout.exchanges,
        "iterations": query.layout.iterations,
        "glue_threshold": query.layout.glue_threshold,
    }
    blob["filters"] = [
        {"op": f.op.value, "dim": f.dim, "values": list(f.values), "via": f.via}
        for f in query.filters
    ]
    return json.dumps(blob, sort_keys=True, default=str)


# --- the query pipeline -----------------------------------------------------

def execute_cloud_query(
    table: FactTable,
    schema: Schema,
    query: CloudQuery,
    iceberg: IcebergCuboid | None = None,
) -> dict:
    """Full pipeline: (iceberg or exact) aggregation, filters and
    roll-ups, top-k, optional clustering plus layout, font scaling. The
    returned dict is the response body minus permalink and timing."""
    if query.iceberg_limit is not None and iceberg is None:
        iceberg = materialize_iceberg(
            table, schema, tuple(schema.dimensions), query.aggregator, query.iceberg_limit
        )
    if iceberg is not None:
        cloud = approx_cloud(iceberg, query)
    else:
        cloud = exact_cloud(table, schema, query)

    layout_cost = None
    if query.clustering_dims and query.layout.kind is not LayoutKind.NONE and len(cloud) >= 2:
        sim_kind = SimilarityKind(query.similarity) if query.similarity else SimilarityKind.COSINE
        ops = resolve_ops(schema, query)
        if iceberg is not None:
            m = similarity_matrix(
                cloud, query.clustering_dims, query.aggregator, sim_kind, iceberg=iceberg, ops=ops
            )
        else:
            m = similarity_matrix(
                cloud, query.clustering_dims, query.aggregator, sim_kind,
                table=table, schema=schema, ops=ops,
            )
        order = nn_order(m)
        if query.layout.kind is LayoutKind.PWMC:
            order = pwmc_order(order, m, query.layout.exchanges, query.seed)
        elif query.layout.kind is LayoutKind.MC:
            order = mc_order(order, m, query.layout.iterations, query.seed)
        layout_cost = mla_cost(order, m)
        hinted = emit_hints(order, m, query.layout.glue_threshold)
    else:
        hinted = list(cloud.tags)

    sizes = {t.coords: s for t, s in font_scale(cloud, query.font_min, query.font_max)}
    items = []
    for element in hinted:
        if element == GLUED:
            items.append(GLUED)
        else:
            items.append(
                {
                    "term": element.term,
                    "coords": list(element.coords),
                    "weight": element.weight,
                    "display_size": sizes[element.coords],
                }
            )

    try:
        h = entropy(cloud)
    except TagCubeError:
        h = None
    try:
        rel_h = relative_entropy(cloud)
    except TagCubeError:
        rel_h = None

    return {
        "tags": items,
        "approximate": cloud.approximate,
        "metrics": {
            "entropy": h,
            "relative_entropy": rel_h,
            "tag_count": len(cloud),
            "mla_cost": layout_cost,
        },
    }


# --- service state ----------------------------------------------------------

_BUILDING = "building"


@dataclass
class DatasetEntry:
    table: FactTable
    schema: Schema | None = None
    schema_version: int = 0


class ServiceState:
    def __init__(self):
        self.registry = DatasetRegistry()
        self.entries: dict[str, DatasetEntry] = {}
        self.icebergs: dict[tuple, object] = {}
        self.permalinks: dict[str, str] = {}
        self.lock = threading.RLock()

    def entry(self, dataset_id: str) -> DatasetEntry:
        try:
            return self.entries[dataset_id]
        except KeyError:
            raise UnknownDataset(dataset_id) from None

    def iceberg_for(self, dataset_id: str, entry: DatasetEntry, query: CloudQuery):
        """Single-flight lazy materialization; raises 409 while another
        request is building the same iceberg."""
        agg = query.aggregator
        key = (
            dataset_id,
            entry.schema_version,
            tuple(entry.schema.dimensions),
            agg.kind.value,
            agg.measure,
            query.iceberg_limit,
        )
        with self.lock:
            state = self.icebergs.get(key)
            if state == _BUILDING:
                raise HTTPException(
                    status_code=409,
                    detail={"error": "IcebergMaterializing", "message": "retry shortly"},
                )
            if state is not None:
                return state
            self.icebergs[key] = _BUILDING
        try:
            berg = materialize_iceberg(
                entry.table,
                entry.schema,
                tuple(entry.schema.dimensions),
                agg,
                query.iceberg_limit,
            )
        except BaseException:
            with self.lock:
                self.icebergs.pop(key, None)
            raise
        with self.lock:
            self.icebergs[key] = berg
        return berg


def _http_error(exc: Exception, status: int) -> HTTPException:
    return HTTPException(
        status_code=status,
        detail={"error": type(exc).__name__, "message": str(exc)},
    )


def _render_embed(response: dict) -> str:
    """Self-contained HTML fragment: inline font sizes, GLUED runs kept
    on one line, no external assets. Safe to drop into an iframe."""
    parts = [
        '<div class="tagcloud" style="font-family:sans-serif;line-height:1.7;word-spacing:0.4em">'
    ]
    run: list[str] = []
    glued_run = False

    def flush():
        nonlocal run, glued_run
        if not run:
            return
        if glued_run and len(run) > 1:
            parts.append('<span class="glued" style="white-space:nowrap">' + " ".join(run) + "</span>")
        else:
            parts.extend(run)
        run = []
        glued_run = False

    previous_was_tag = False
    for element in response["tags"]:
        if element == GLUED:
            glued_run = True
            previous_was_tag = False
            continue
        if previous_was_tag and not glued_run:
            flush()
        run.append(
            f'<span class="tag" style="font-size:{element["display_size"]:.2f}px">'
            f'{html.escape(element["term"])}</span>'
        )
        previous_was_tag = True
    flush()
    parts.append("</div>")
    return "".join(parts)


def create_app(state: ServiceState | None = None) -> FastAPI:
    state = state or ServiceState()
    app = FastAPI(title="tagcube", version="0.1.0")
    app.state.engine = state

    @app.post("/datasets", status_code=201)
    async def upload_dataset(request: Request, delimiter: str = ",", header: bool = True):
        body = await request.body()
        try:
            table = ingest_csv(body, IngestOptions(delimiter=delimiter, header_row=header))
        except TagCubeError as exc:
            raise _http_error(exc, 400)
        dataset_id = state.registry.add(table)
        with state.lock:
            state.entries[dataset_id] = DatasetEntry(table=table)
        return {"dataset_id": dataset_id}

    @app.get("/datasets")
    def list_datasets():
        with state.lock:
            return {
                "datasets": [
                    {
                        "dataset_id": ds,
                        "row_count": e.table.row_count,
                        "columns": [
                            {"name": c.name, "kind": c.kind.value} for c in e.table.columns
                        ],
                        "schema_version": e.schema_version or None,
                    }
                    for ds, e in state.entries.items()
                ]
            }

    @app.get("/datasets/{dataset_id}/dimensions")
    def dataset_dimensions(dataset_id: str):
        try:
            entry = state.entry(dataset_id)
        except UnknownDataset as exc:
            raise _http_error(exc, 404)
        if entry.schema is not None:
            dims = entry.schema.dimensions
        else:
            dims = entry.table.names_of_kind(ColumnKind.DIMENSION)
        return {
            "dimensions": {d: len(entry.table.distinct_values(d)) for d in dims}
        }

    @app.put("/datasets/{dataset_id}/schema")
    def put_schema(dataset_id: str, body: dict):
        try:
            entry = state.entry(dataset_id)
        except UnknownDataset as exc:
            raise _http_error(exc, 404)
        try:
            schema = define_schema(
                entry.table,
                body.get("dimensions", ()),
                body.get("measures", ()),
            )
            for h in body.get("hierarchies", ()):
                schema = attach_hierarchy(
                    entry.table, schema, h["child"], h["parent"], h["mapping"]
                )
        except TagCubeError as exc:
            raise _http_error(exc, 422)
        except (KeyError, TypeError) as exc:
            raise HTTPException(422, detail={"error": "BadSchemaBody", "message": str(exc)})
        with state.lock:
            entry.schema = schema
            entry.schema_version += 1
            version = entry.schema_version
        return {"schema_version": version}

    @app.post("/datasets/{dataset_id}/clouds")
    def post_cloud(dataset_id: str, body: dict):
        try:
            entry = state.entry(dataset_id)
        except UnknownDataset as exc:
            raise _http_error(exc, 404)
        if entry.schema is None:
            raise HTTPException(
                422, detail={"error": "NoSchema", "message": "define a schema first"}
            )
        try:
            query = parse_cloud_query(body)
        except (ValueError, KeyError, TypeError) as exc:
            raise HTTPException(422, detail={"error": "BadQuery", "message": str(exc)})

        berg = None
        if query.iceberg_limit is not None:
            try:
                berg = state.iceberg_for(dataset_id, entry, query)
            except TagCubeError as exc:
                raise _http_error(exc, 422)

        t0 = time.perf_counter()
        try:
            response = execute_cloud_query(entry.table, entry.schema, query, iceberg=berg)
        except TagCubeError as exc:
            raise _http_error(exc, 422)
        except ValueError as exc:
            raise HTTPException(422, detail={"error": "BadQuery", "message": str(exc)})
        elapsed_ms = (time.perf_counter() - t0) * 1000.0

        digest = hashlib.sha256()
        digest.update(dataset_id.encode())
        digest.update(str(entry.schema_version).encode())
        digest.update(canonical_query_json(query).encode())
        permalink_id = digest.hexdigest()[:16]

        response["permalink"] = f"/clouds/{permalink_id}"
        response["timing_ms"] = elapsed_ms
        serialized = json.dumps(response)
        with state.lock:
            state.permalinks.setdefault(permalink_id, serialized)
        return Response(content=serialized, media_type="application/json")

    @app.get("/clouds/{permalink_id}")
    def get_cloud(permalink_id: str):
        stored = state.permalinks.get(permalink_id)
        if stored is None:
            raise HTTPException(404, detail={"error": "UnknownPermalink", "message": permalink_id})
        return Response(content=stored, media_type="application/json")

    @app.get("/clouds/{permalink_id}/embed")
    def get_embed(permalink_id: str):
        stored = state.permalinks.get(permalink_id)
        if stored is None:
            raise HTTPException(404, detail={"error": "UnknownPermalink", "message": permalink_id})
        return Response(content=_render_embed(json.loads(stored)), media_type="text/html")

    static_dir = os.environ.get("TAGCUBE_STATIC")
    if static_dir is None:
        candidate = os.path.join(os.getcwd(), "frontend", "dist")
        static_dir = candidate if os.path.isdir(candidate) else None
    if static_dir and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def serve(host: str | None = None, port: int | None = None) -> None:
    """Run the HTTP service; bind address/port come from arguments or the
    TAGCUBE_HOST / TAGCUBE_PORT environment variables."""
    import uvicorn

    host = host or os.environ.get("TAGCUBE_HOST", "127.0.0.1")
    port = port or int(os.environ.get("TAGCUBE_PORT", "8765"))
    uvicorn.run(create_app(), host=host, port=port)
