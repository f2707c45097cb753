import csv
import json

import pytest
from click.testing import CliRunner

from tagcube.cli import main

from conftest import CITY_COUNTRY, SAMPLE_SALES_CSV


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def sales_csv(tmp_path):
    path = tmp_path / "sales.csv"
    path.write_text(SAMPLE_SALES_CSV)
    return str(path)


@pytest.fixture()
def country_csv(tmp_path):
    path = tmp_path / "countries.csv"
    path.write_text("".join(f"{city},{country}\n" for city, country in CITY_COUNTRY.items()))
    return str(path)


class TestIngestCommand:
    def test_shows_inferred_roles(self, runner, sales_csv):
        result = runner.invoke(main, ["ingest", sales_csv])
        assert result.exit_code == 0
        assert "rows: 11" in result.output
        assert "location: dimension" in result.output
        assert "profit: measure" in result.output

    def test_missing_file_is_io_error(self, runner):
        result = runner.invoke(main, ["ingest", "/no/such/file.csv"])
        assert result.exit_code == 1

    def test_bad_data_is_validation_error(self, runner, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2,3\n")
        result = runner.invoke(main, ["ingest", str(bad)])
        assert result.exit_code == 2


class TestSchemaCommand:
    def test_valid_schema(self, runner, sales_csv, country_csv):
        result = runner.invoke(
            main,
            [
                "schema", sales_csv,
                "--dims", "location,time,salesman,product",
                "--measures", "cost,profit",
                "--hierarchy", f"location:Country:{country_csv}",
            ],
        )
        assert result.exit_code == 0
        assert "hierarchy: location -> Country (7 values)" in result.output

    def test_overlap_exits_2(self, runner, sales_csv):
        result = runner.invoke(
            main, ["schema", sales_csv, "--dims", "location", "--measures", "location"]
        )
        assert result.exit_code == 2


class TestCloudCommand:
    def test_count_by_location(self, runner, sales_csv):
        result = runner.invoke(
            main, ["cloud", sales_csv, "--group", "location", "--agg", "count", "--k", "3"]
        )
        assert result.exit_code == 0
        lines = [l for l in result.output.splitlines() if l and not l.startswith(("entropy", "relative"))]
        assert lines[0].startswith("Paris 3")
        assert lines[1].startswith("Montreal 2")
        assert lines[2].startswith("New York 2")

    def test_k_zero_exits_2(self, runner, sales_csv):
        result = runner.invoke(
            main, ["cloud", sales_csv, "--group", "location", "--k", "0"]
        )
        assert result.exit_code == 2
        assert "k must be" in result.output

    def test_json_round_trips(self, runner, sales_csv):
        result = runner.invoke(
            main,
            ["cloud", sales_csv, "--group", "location", "--k", "3", "--format", "json"],
        )
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert json.loads(json.dumps(body)) == body
        assert body["metrics"]["tag_count"] == 3

    def test_rollup_and_slice_flags(self, runner, sales_csv, country_csv):
        result = runner.invoke(
            main,
            [
                "cloud", sales_csv,
                "--group", "Country",
                "--agg", "sum:profit",
                "--k", "5",
                "--hierarchy", f"location:Country:{country_csv}",
                "--rollup", "location:Country",
            ],
        )
        assert result.exit_code == 0, result.output
        assert "Canada 95" in result.output
        assert "France 45" in result.output
        assert "USA 30" in result.output

    def test_iceberg_flag_reports_approximation(self, runner, sales_csv):
        result = runner.invoke(
            main,
            [
                "cloud", sales_csv,
                "--group", "location",
                "--k", "3",
                "--iceberg-limit", "3",
            ],
        )
        assert result.exit_code == 0
        assert "approximate" in result.output

    def test_layout_flag_emits_glue_tokens(self, runner, sales_csv):
        result = runner.invoke(
            main,
            [
                "cloud", sales_csv,
                "--group", "location",
                "--k", "3",
                "--clustering", "product",
                "--similarity", "cosine",
                "--layout", "nn",
            ],
        )
        assert result.exit_code == 0
        assert "[GLUED]" in result.output
        assert "arrangement cost" in result.output


class TestGenCommand:
    def test_deterministic_given_seed(self, runner, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            result = runner.invoke(
                main,
                [
                    "gen", "--dims", "2", "--cardinalities", "5,9",
                    "--rows", "200", "--skew", "1.2", "--seed", "3",
                    "-o", str(out),
                ],
            )
            assert result.exit_code == 0
        assert a.read_text() == b.read_text()

    def test_bad_spec_exits_2(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["gen", "--dims", "2", "--cardinalities", "5", "-o", str(tmp_path / "x.csv")],
        )
        assert result.exit_code == 2


class TestBenchCommands:
    def test_bench_iceberg_writes_report(self, runner, tmp_path):
        data = tmp_path / "cube.csv"
        runner.invoke(
            main,
            ["gen", "--dims", "4", "--cardinalities", "4,6,8,10",
             "--rows", "2000", "--skew", "1.1", "--seed", "5", "-o", str(data)],
        )
        out = tmp_path / "report.csv"
        result = runner.invoke(
            main,
            [
                "bench-iceberg", str(data),
                "--dims", "dim1,dim2,dim3,dim4",
                "--limits", "10,1000000",
                "--sizes", "5,10",
                "--repetitions", "1",
                "-o", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 16
        saturated = [r for r in rows if r["limit"] == "1000000"]
        assert all(float(r["fp_index"]) == 0.0 for r in saturated)

    def test_bench_layout_writes_report_and_summary(self, runner, tmp_path):
        data = tmp_path / "cube.csv"
        runner.invoke(
            main,
            ["gen", "--dims", "3", "--cardinalities", "5,7,9",
             "--rows", "1500", "--skew", "1.0", "--seed", "6", "-o", str(data)],
        )
        out = tmp_path / "layout.csv"
        result = runner.invoke(
            main,
            [
                "bench-layout", str(data),
                "--measures", "cosine",
                "--heuristics", "nn,pwmc:50",
                "--limit", "30",
                "--size", "10",
                "--repetitions", "1",
                "-o", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        assert "NN" in result.output and "PWMC(50)" in result.output
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 3 * 2 * 2  # ordered dim pairs x heuristics
