"""Command-line driver: ingest, schema, cloud, gen, bench-iceberg,
bench-layout, serve.

Exit codes: 2 for validation failures (bad schema, bad query, malformed
data), 1 for I/O failures. The `cloud` subcommand mirrors the HTTP cloud
endpoint for offline use; when no schema flags are given, roles are
inferred from the data.
"""

from __future__ import annotations

import json
import sys

import click

from . import bench as bench_mod
from .cloud import DEFAULT_MAX_TAGS
from .cube import Aggregator, AggKind
from .errors import TagCubeError
from .facts import (
    ColumnKind,
    IngestOptions,
    Schema,
    attach_hierarchy,
    define_schema,
    ingest_csv,
    read_hierarchy_csv,
)
from .query import CloudQuery, Filter, FilterOp, LayoutKind, LayoutSpec, RollupSpec
from .service import execute_cloud_query
from .similarity import SimilarityKind
from .synth import ZipfSpec, write_csv


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _read_file(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        _fail(str(exc), 1)


def _load_table(path: str, delimiter: str, header: bool, measures, dimensions):
    hints = {}
    for name in measures or ():
        hints[name] = ColumnKind.MEASURE
    for name in dimensions or ():
        hints[name] = ColumnKind.DIMENSION
    options = IngestOptions(
        delimiter=delimiter, header_row=header, measure_hint=hints or None
    )
    try:
        return ingest_csv(_read_file(path), options)
    except TagCubeError as exc:
        _fail(str(exc), 2)


def _schema_for(table, dims_opt: str | None, measures_opt: str | None) -> Schema:
    dims = (
        tuple(d.strip() for d in dims_opt.split(",") if d.strip())
        if dims_opt
        else table.names_of_kind(ColumnKind.DIMENSION)
    )
    measures = (
        tuple(m.strip() for m in measures_opt.split(",") if m.strip())
        if measures_opt
        else table.names_of_kind(ColumnKind.MEASURE)
    )
    try:
        return define_schema(table, dims, measures)
    except TagCubeError as exc:
        _fail(str(exc), 2)


def _attach_hierarchies(table, schema, hierarchy_opts):
    for spec in hierarchy_opts or ():
        try:
            child, parent, path = spec.split(":", 2)
        except ValueError:
            _fail(f"--hierarchy wants child:parent:file.csv, got {spec!r}", 2)
        try:
            mapping = read_hierarchy_csv(_read_file(path))
            schema = attach_hierarchy(table, schema, child, parent, mapping)
        except TagCubeError as exc:
            _fail(str(exc), 2)
    return schema


def _parse_agg(text: str) -> Aggregator:
    name, _, measure = text.partition(":")
    try:
        kind = AggKind(name.upper())
    except ValueError:
        _fail(f"unknown aggregator {name!r}", 2)
    if kind is AggKind.COUNT:
        return Aggregator.count()
    if not measure:
        _fail(f"{kind.value} needs a measure: use {name}:column", 2)
    return Aggregator(kind, measure)


@click.group()
def main():
    """Tag clouds over ad-hoc data cubes."""


@main.command()
@click.argument("path")
@click.option("--delimiter", default=",", show_default=True)
@click.option("--no-header", is_flag=True, help="Data has no header row.")
@click.option("--measure", "measures", multiple=True, help="Force a column to be a measure.")
@click.option("--dimension", "dimensions", multiple=True, help="Force a column to be a dimension.")
def ingest(path, delimiter, no_header, measures, dimensions):
    """Validate a CSV file and show the inferred column roles."""
    table = _load_table(path, delimiter, not no_header, measures, dimensions)
    click.echo(f"rows: {table.row_count}")
    for col in table.columns:
        click.echo(f"  {col.name}: {col.kind.value.lower()}")


@main.command()
@click.argument("path")
@click.option("--dims", required=True, help="Comma-separated dimension columns.")
@click.option("--measures", required=True, help="Comma-separated measure columns.")
@click.option("--hierarchy", "hierarchies", multiple=True, metavar="CHILD:PARENT:FILE")
@click.option("--delimiter", default=",")
@click.option("--no-header", is_flag=True)
def schema(path, dims, measures, hierarchies, delimiter, no_header):
    """Validate a schema (and optional hierarchies) against a CSV file."""
    table = _load_table(path, delimiter, not no_header, None, None)
    sch = _schema_for(table, dims, measures)
    sch = _attach_hierarchies(table, sch, hierarchies)
    click.echo(f"dimensions: {', '.join(sch.dimensions)}")
    click.echo(f"measures: {', '.join(sch.measures)}")
    for h in sch.hierarchies:
        click.echo(f"hierarchy: {h.child_dimension} -> {h.parent_name} ({len(h.mapping)} values)")


@main.command()
@click.argument("path")
@click.option("--group", required=True, help="Comma-separated display dimensions.")
@click.option("--agg", default="count", show_default=True, help="count | sum:COL | average:COL | min:COL | max:COL")
@click.option("--k", default=DEFAULT_MAX_TAGS, show_default=True)
@click.option("--dims", default=None, help="Schema dimensions (default: inferred).")
@click.option("--measures", default=None, help="Schema measures (default: inferred).")
@click.option("--hierarchy", "hierarchies", multiple=True, metavar="CHILD:PARENT:FILE")
@click.option("--slice", "slices", multiple=True, metavar="DIM=VALUE")
@click.option("--dice", "dices", multiple=True, metavar="DIM=V1|V2|...")
@click.option("--rollup", "rollups", multiple=True, metavar="CHILD:PARENT")
@click.option("--iceberg-limit", default=None, type=int, help="Approximate via an iceberg of this many cells.")
@click.option("--clustering", default=None, help="Comma-separated clustering dimensions.")
@click.option("--similarity", default=None, type=click.Choice([k.value.lower() for k in SimilarityKind]))
@click.option("--layout", default="none", help="none | nn | pwmc:EXCHANGES | mc:ITERATIONS")
@click.option("--seed", default=0, show_default=True)
@click.option("--format", "fmt", default="text", type=click.Choice(["text", "json"]), show_default=True)
@click.option("--delimiter", default=",")
@click.option("--no-header", is_flag=True)
def cloud(path, group, agg, k, dims, measures, hierarchies, slices, dices, rollups,
          iceberg_limit, clustering, similarity, layout, seed, fmt, delimiter, no_header):
    """Compute a tag cloud from a CSV file and print it."""
    if k < 1:
        _fail(f"k must be >= 1, got {k}", 2)
    table = _load_table(path, delimiter, not no_header, None, None)
    sch = _schema_for(table, dims, measures)
    sch = _attach_hierarchies(table, sch, hierarchies)

    filters = []
    for spec in slices:
        dim, _, value = spec.partition("=")
        if not dim or not value:
            _fail(f"--slice wants DIM=VALUE, got {spec!r}", 2)
        filters.append(Filter(op=FilterOp.SLICE, dim=dim, values=(value,)))
    for spec in dices:
        dim, _, values = spec.partition("=")
        vals = tuple(v for v in values.split("|") if v)
        if not dim or not vals:
            _fail(f"--dice wants DIM=V1|V2, got {spec!r}", 2)
        filters.append(Filter(op=FilterOp.DICE, dim=dim, values=vals))
    rolls = []
    for spec in rollups:
        child, _, parent = spec.partition(":")
        if not child or not parent:
            _fail(f"--rollup wants CHILD:PARENT, got {spec!r}", 2)
        rolls.append(RollupSpec(child=child, parent=parent))

    name, _, budget = layout.partition(":")
    try:
        layout_kind = LayoutKind(name.upper())
    except ValueError:
        _fail(f"unknown layout {name!r}", 2)
    layout_spec = LayoutSpec(
        kind=layout_kind,
        exchanges=int(budget) if budget else 1000,
        iterations=int(budget) if budget else 1000,
    )

    try:
        query = CloudQuery(
            group_dims=tuple(g.strip() for g in group.split(",") if g.strip()),
            aggregator=_parse_agg(agg),
            filters=tuple(filters),
            rollups=tuple(rolls),
            k=k,
            clustering_dims=tuple(
                c.strip() for c in (clustering or "").split(",") if c.strip()
            ),
            similarity=similarity.upper() if similarity else None,
            layout=layout_spec,
            iceberg_limit=iceberg_limit,
            seed=seed,
        )
        response = execute_cloud_query(table, sch, query)
    except (TagCubeError, ValueError) as exc:
        _fail(str(exc), 2)

    if fmt == "json":
        click.echo(json.dumps(response))
        return
    for element in response["tags"]:
        if isinstance(element, str):
            click.echo(f"  [{element}]")
        else:
            click.echo(f"{element['term']} {element['weight']:g} (size {element['display_size']:.1f})")
    metrics = response["metrics"]
    if metrics["entropy"] is not None:
        click.echo(f"entropy: {metrics['entropy']:.4f}")
    if metrics["relative_entropy"] is not None:
        click.echo(f"relative entropy: {metrics['relative_entropy']:.4f}")
    if metrics["mla_cost"] is not None:
        click.echo(f"arrangement cost: {metrics['mla_cost']:.4f}")
    if response["approximate"]:
        click.echo("(approximate: computed from an iceberg)")


@main.command()
@click.option("--dims", default=4, show_default=True)
@click.option("--cardinalities", required=True, help="Comma-separated, one per dimension.")
@click.option("--rows", default=100000, show_default=True)
@click.option("--skew", default=1.2, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("-o", "--out", required=True, type=click.Path())
def gen(dims, cardinalities, rows, skew, seed, out):
    """Write a seeded Zipf-distributed synthetic CSV."""
    try:
        spec = ZipfSpec(
            dims=dims,
            cardinalities=tuple(int(c) for c in cardinalities.split(",")),
            rows=rows,
            skew=skew,
            seed=seed,
        )
    except ValueError as exc:
        _fail(str(exc), 2)
    try:
        write_csv(spec, out)
    except OSError as exc:
        _fail(str(exc), 1)
    click.echo(f"wrote {rows} rows to {out}")


@main.command(name="bench-iceberg")
@click.argument("path")
@click.option("--dims", required=True, help="The cube's dimensions (comma-separated, typically 4).")
@click.option("--limits", default=",".join(str(x) for x in bench_mod.ICEBERG_LIMITS), show_default=True)
@click.option("--sizes", default=",".join(str(x) for x in bench_mod.CLOUD_SIZES), show_default=True)
@click.option("--repetitions", default=3, show_default=True)
@click.option("--workers", default=1, show_default=True)
@click.option("-o", "--out", required=True, type=click.Path())
@click.option("--delimiter", default=",")
@click.option("--no-header", is_flag=True)
def bench_iceberg_cmd(path, dims, limits, sizes, repetitions, workers, out, delimiter, no_header):
    """Iceberg quality/speed sweep: one CSV row per (dim, limit, size)."""
    table = _load_table(path, delimiter, not no_header, None, None)
    dim_list = tuple(d.strip() for d in dims.split(",") if d.strip())
    sch = _schema_for(table, ",".join(dim_list), None)
    try:
        rows = bench_mod.bench_iceberg(
            table,
            sch,
            dim_list,
            limits=[int(x) for x in limits.split(",")],
            sizes=[int(x) for x in sizes.split(",")],
            repetitions=repetitions,
            workers=workers,
        )
    except TagCubeError as exc:
        _fail(str(exc), 2)
    try:
        bench_mod.write_iceberg_report(rows, out)
    except OSError as exc:
        _fail(str(exc), 1)
    click.echo(f"wrote {len(rows)} rows to {out}")


@main.command(name="bench-layout")
@click.argument("path")
@click.option("--measures", default="cosine,tanimoto", show_default=True)
@click.option("--heuristics", default="nn,pwmc:10,pwmc:100,pwmc:1000,mc:1000", show_default=True)
@click.option("--limit", default=150, show_default=True, help="Iceberg limit.")
@click.option("--size", default=150, show_default=True, help="Tag-cloud size.")
@click.option("--seed", default=0, show_default=True)
@click.option("--repetitions", default=3, show_default=True)
@click.option("--workers", default=1, show_default=True)
@click.option("-o", "--out", required=True, type=click.Path())
@click.option("--delimiter", default=",")
@click.option("--no-header", is_flag=True)
def bench_layout_cmd(path, measures, heuristics, limit, size, seed, repetitions, workers,
                     out, delimiter, no_header):
    """Layout-heuristic sweep over all (display, clustering) dimension pairs."""
    table = _load_table(path, delimiter, not no_header, None, None)
    sch = _schema_for(table, None, None)
    try:
        kinds = [SimilarityKind(m.strip().upper()) for m in measures.split(",") if m.strip()]
        specs = [bench_mod.HeuristicSpec.parse(h.strip()) for h in heuristics.split(",") if h.strip()]
    except ValueError as exc:
        _fail(str(exc), 2)
    try:
        rows = bench_mod.bench_layout(
            table,
            sch,
            measure_kinds=kinds,
            heuristics=specs,
            iceberg_limit=limit,
            size=size,
            seed=seed,
            repetitions=repetitions,
            workers=workers,
        )
    except TagCubeError as exc:
        _fail(str(exc), 2)
    try:
        bench_mod.write_layout_report(rows, out)
    except OSError as exc:
        _fail(str(exc), 1)
    summary = bench_mod.layout_summary(rows)
    for heuristic, stats in summary.items():
        counts = "  ".join(
            f"{label}: {stats[label]}" for label in stats if label.startswith("gain")
        )
        click.echo(f"{heuristic:12s} clouds: {stats['clouds']:4d}  {counts}  mean time: {stats['mean_time']:.4f}s")
    click.echo(f"wrote {len(rows)} rows to {out}")


@main.command()
@click.option("--host", default=None, help="Bind address (default: TAGCUBE_HOST or 127.0.0.1).")
@click.option("--port", default=None, type=int, help="Port (default: TAGCUBE_PORT or 8765).")
def serve(host, port):
    """Run the HTTP service."""
    from .service import serve as run

    run(host=host, port=port)


if __name__ == "__main__":
    main()
