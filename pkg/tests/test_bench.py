import csv

import pytest

from tagcube import ZipfSpec, as_fact_table, false_negative_index, false_positive_index
from tagcube.bench import (
    HeuristicSpec,
    bench_iceberg,
    bench_layout,
    layout_summary,
    write_iceberg_report,
    write_layout_report,
)
from tagcube.query import LayoutKind
from tagcube.similarity import SimilarityKind
from tagcube.synth import default_schema


@pytest.fixture(scope="module")
def small_cube():
    spec = ZipfSpec(dims=4, cardinalities=(5, 8, 12, 20), rows=4000, skew=1.1, seed=21)
    table = as_fact_table(spec)
    return table, default_schema(table)


class TestBenchIceberg:
    def test_grid_shape_and_saturation(self, small_cube):
        table, schema = small_cube
        rows = bench_iceberg(
            table,
            schema,
            schema.dimensions,
            limits=[10, 10**6],
            sizes=[5, 10],
            repetitions=1,
        )
        assert len(rows) == len(schema.dimensions) * 2 * 2
        for row in rows:
            assert -1e9 < row.relative_gain <= 1.0
            if row.limit == 10**6:  # iceberg holds every cell: exact answers
                assert row.fp_index == 0.0
                assert row.fn_index == 0.0

    def test_quality_columns_are_auditable(self, small_cube):
        table, schema = small_cube
        rows = bench_iceberg(
            table, schema, schema.dimensions, limits=[25], sizes=[8], repetitions=1
        )
        for row in rows:
            assert row.fp_index == false_positive_index(row.approx, row.exact)
            assert row.fn_index == false_negative_index(row.approx, row.exact)

    def test_report_round_trips(self, small_cube, tmp_path):
        table, schema = small_cube
        rows = bench_iceberg(
            table, schema, schema.dimensions[:2], limits=[10], sizes=[5], repetitions=1
        )
        out = tmp_path / "iceberg.csv"
        write_iceberg_report(rows, out)
        with open(out) as fh:
            parsed = list(csv.DictReader(fh))
        assert len(parsed) == len(rows)
        assert float(parsed[0]["fp_index"]) == rows[0].fp_index

    def test_workers_produce_identical_rows(self, small_cube):
        table, schema = small_cube
        kwargs = dict(limits=[10], sizes=[5], repetitions=1)
        serial = bench_iceberg(table, schema, schema.dimensions[:2], **kwargs)
        threaded = bench_iceberg(table, schema, schema.dimensions[:2], workers=4, **kwargs)
        for a, b in zip(serial, threaded):
            assert (a.display_dim, a.limit, a.size, a.fp_index, a.fn_index) == (
                b.display_dim, b.limit, b.size, b.fp_index, b.fn_index
            )


class TestBenchLayout:
    def test_pair_count_and_monotone_costs(self, small_cube):
        table, schema = small_cube
        heuristics = (
            HeuristicSpec(LayoutKind.NN),
            HeuristicSpec(LayoutKind.PWMC, 100),
        )
        rows = bench_layout(
            table,
            schema,
            measure_kinds=(SimilarityKind.COSINE,),
            heuristics=heuristics,
            iceberg_limit=50,
            size=20,
            repetitions=1,
        )
        n_dims = len(schema.dimensions)
        assert len(rows) == n_dims * (n_dims - 1) * len(heuristics)
        by_pair = {}
        for row in rows:
            by_pair.setdefault((row.display_dim, row.clustering_dim), {})[row.heuristic] = row
        for pair_rows in by_pair.values():
            assert pair_rows["PWMC(100)"].cost <= pair_rows["NN"].cost + 1e-9

    def test_summary_counts(self, small_cube):
        table, schema = small_cube
        rows = bench_layout(
            table,
            schema,
            measure_kinds=(SimilarityKind.COSINE,),
            heuristics=(HeuristicSpec(LayoutKind.NN),),
            iceberg_limit=50,
            size=20,
            repetitions=1,
        )
        summary = layout_summary(rows)
        assert summary["NN"]["clouds"] == len(rows)
        assert summary["NN"]["gain>0%"] >= summary["NN"]["gain>30%"]

    def test_report_writer(self, small_cube, tmp_path):
        table, schema = small_cube
        rows = bench_layout(
            table,
            schema,
            measure_kinds=(SimilarityKind.TANIMOTO,),
            heuristics=(HeuristicSpec(LayoutKind.NN),),
            iceberg_limit=30,
            size=15,
            repetitions=1,
        )
        out = tmp_path / "layout.csv"
        write_layout_report(rows, out)
        with open(out) as fh:
            parsed = list(csv.DictReader(fh))
        assert len(parsed) == len(rows)
        assert parsed[0]["heuristic"] == "NN"


class TestHeuristicSpec:
    def test_parse(self):
        assert HeuristicSpec.parse("nn").label == "NN"
        assert HeuristicSpec.parse("pwmc:250").label == "PWMC(250)"
        assert HeuristicSpec.parse("mc:50").label == "MC(50)"
        assert HeuristicSpec.parse("pwmc").budget == 1000
