import math
import re

import pytest
from fastapi.testclient import TestClient

from tagcube.service import ServiceState, create_app, _BUILDING

from conftest import CITY_COUNTRY, SAMPLE_SALES_CSV

SALES_SCHEMA_BODY = {
    "dimensions": ["location", "time", "salesman", "product"],
    "measures": ["cost", "profit"],
    "hierarchies": [{"child": "location", "parent": "Country", "mapping": CITY_COUNTRY}],
}


@pytest.fixture()
def state():
    return ServiceState()


@pytest.fixture()
def client(state):
    return TestClient(create_app(state))


@pytest.fixture()
def dataset(client):
    resp = client.post("/datasets", content=SAMPLE_SALES_CSV.encode())
    dataset_id = resp.json()["dataset_id"]
    client.put(f"/datasets/{dataset_id}/schema", json=SALES_SCHEMA_BODY)
    return dataset_id


class TestDatasets:
    def test_upload_returns_201_and_id(self, client):
        resp = client.post("/datasets", content=SAMPLE_SALES_CSV.encode())
        assert resp.status_code == 201
        assert resp.json()["dataset_id"]

    def test_empty_body_is_400(self, client):
        resp = client.post("/datasets", content=b"")
        assert resp.status_code == 400
        assert resp.json()["detail"]["error"] == "EmptyInput"

    def test_reupload_gets_fresh_id(self, client):
        a = client.post("/datasets", content=SAMPLE_SALES_CSV.encode()).json()["dataset_id"]
        b = client.post("/datasets", content=SAMPLE_SALES_CSV.encode()).json()["dataset_id"]
        assert a != b

    def test_listing_shows_columns(self, client, dataset):
        listing = client.get("/datasets").json()["datasets"]
        entry = next(e for e in listing if e["dataset_id"] == dataset)
        assert entry["row_count"] == 11
        assert {"name": "location", "kind": "DIMENSION"} in entry["columns"]
        assert entry["schema_version"] == 1

    def test_dimension_cardinalities_for_pickers(self, client, dataset):
        resp = client.get(f"/datasets/{dataset}/dimensions")
        assert resp.json()["dimensions"] == {
            "location": 7,
            "time": 6,
            "salesman": 8,
            "product": 4,
        }


class TestSchema:
    def test_put_schema_bumps_version(self, client):
        ds = client.post("/datasets", content=SAMPLE_SALES_CSV.encode()).json()["dataset_id"]
        first = client.put(f"/datasets/{ds}/schema", json=SALES_SCHEMA_BODY)
        assert first.status_code == 200
        assert first.json()["schema_version"] == 1
        second = client.put(f"/datasets/{ds}/schema", json=SALES_SCHEMA_BODY)
        assert second.json()["schema_version"] == 2

    def test_overlapping_roles_is_422(self, client):
        ds = client.post("/datasets", content=SAMPLE_SALES_CSV.encode()).json()["dataset_id"]
        resp = client.put(
            f"/datasets/{ds}/schema",
            json={"dimensions": ["location"], "measures": ["location"]},
        )
        assert resp.status_code == 422
        assert resp.json()["detail"]["error"] == "OverlappingRoles"

    def test_unknown_dataset_is_404(self, client):
        assert client.put("/datasets/nope/schema", json=SALES_SCHEMA_BODY).status_code == 404


class TestClouds:
    def test_exact_count_by_location(self, client, dataset):
        resp = client.post(
            f"/datasets/{dataset}/clouds",
            json={"group_dims": ["location"], "aggregator": "COUNT", "k": 3},
        )
        assert resp.status_code == 200
        body = resp.json()
        tags = [t for t in body["tags"] if isinstance(t, dict)]
        assert [(t["term"], t["weight"]) for t in tags] == [
            ("Paris", 3),
            ("Montreal", 2),
            ("New York", 2),
        ]
        assert body["approximate"] is False
        assert body["metrics"]["entropy"] == pytest.approx(1.0789, abs=1e-4)
        assert body["metrics"]["tag_count"] == 3

    def test_iceberg_path_flags_approximate(self, client):
        ds = client.post("/datasets", content=SAMPLE_SALES_CSV.encode()).json()["dataset_id"]
        client.put(
            f"/datasets/{ds}/schema",
            json={"dimensions": ["location", "product"], "measures": ["cost"]},
        )
        resp = client.post(
            f"/datasets/{ds}/clouds",
            json={
                "group_dims": ["location"],
                "aggregator": "COUNT",
                "k": 3,
                "iceberg_limit": 3,
            },
        )
        body = resp.json()
        tags = [t for t in body["tags"] if isinstance(t, dict)]
        assert sorted(t["weight"] for t in tags) == [2, 2, 2]
        assert body["approximate"] is True
        assert body["metrics"]["relative_entropy"] == pytest.approx(1.0)

    def test_rollup_filter_layout_pipeline(self, client, dataset):
        resp = client.post(
            f"/datasets/{dataset}/clouds",
            json={
                "group_dims": ["location"],
                "aggregator": "COUNT",
                "k": 5,
                "clustering_dims": ["product"],
                "similarity": "cosine",
                "layout": {"kind": "NN", "glue_threshold": 0.5},
            },
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["metrics"]["mla_cost"] is not None
        assert "GLUED" in body["tags"]

    def test_k_zero_is_422(self, client, dataset):
        resp = client.post(
            f"/datasets/{dataset}/clouds",
            json={"group_dims": ["location"], "aggregator": "COUNT", "k": 0},
        )
        assert resp.status_code == 422

    def test_unknown_dims_is_422(self, client, dataset):
        resp = client.post(
            f"/datasets/{dataset}/clouds",
            json={"group_dims": ["galaxy"], "aggregator": "COUNT", "k": 3},
        )
        assert resp.status_code == 422

    def test_no_schema_is_422(self, client):
        ds = client.post("/datasets", content=SAMPLE_SALES_CSV.encode()).json()["dataset_id"]
        resp = client.post(
            f"/datasets/{ds}/clouds",
            json={"group_dims": ["location"], "aggregator": "COUNT", "k": 3},
        )
        assert resp.status_code == 422
        assert resp.json()["detail"]["error"] == "NoSchema"

    def test_materializing_iceberg_is_409(self, client, state, dataset):
        entry = state.entry(dataset)
        key = (
            dataset,
            entry.schema_version,
            tuple(entry.schema.dimensions),
            "COUNT",
            None,
            5,
        )
        state.icebergs[key] = _BUILDING
        resp = client.post(
            f"/datasets/{dataset}/clouds",
            json={"group_dims": ["location"], "aggregator": "COUNT", "k": 3, "iceberg_limit": 5},
        )
        assert resp.status_code == 409

    def test_metrics_match_recomputation(self, client, dataset):
        resp = client.post(
            f"/datasets/{dataset}/clouds",
            json={"group_dims": ["location"], "aggregator": "COUNT", "k": 7},
        )
        body = resp.json()
        weights = [t["weight"] for t in body["tags"] if isinstance(t, dict)]
        total = sum(weights)
        recomputed = -sum(w / total * math.log(w / total) for w in weights if w)
        assert abs(body["metrics"]["entropy"] - recomputed) < 1e-9

    def test_identical_queries_agree_minus_timing(self, client, dataset):
        query = {
            "group_dims": ["location"],
            "aggregator": "COUNT",
            "k": 5,
            "seed": 7,
            "clustering_dims": ["product"],
            "similarity": "tanimoto",
            "layout": {"kind": "PWMC", "exchanges": 200},
        }
        a = client.post(f"/datasets/{dataset}/clouds", json=query).json()
        b = client.post(f"/datasets/{dataset}/clouds", json=query).json()
        a.pop("timing_ms")
        b.pop("timing_ms")
        assert a == b


class TestPermalinks:
    def test_stored_response_replays_byte_identical(self, client, dataset):
        resp = client.post(
            f"/datasets/{dataset}/clouds",
            json={"group_dims": ["location"], "aggregator": "COUNT", "k": 3},
        )
        permalink = resp.json()["permalink"]
        first = client.get(permalink)
        second = client.get(permalink)
        assert first.status_code == 200
        assert first.content == second.content == resp.content

    def test_unknown_permalink_404(self, client):
        assert client.get("/clouds/feedfeedfeedfeed").status_code == 404

    def test_embed_renders_one_element_per_tag(self, client, dataset):
        resp = client.post(
            f"/datasets/{dataset}/clouds",
            json={"group_dims": ["location"], "aggregator": "COUNT", "k": 3},
        )
        permalink = resp.json()["permalink"]
        html_text = client.get(f"{permalink}/embed").text
        spans = re.findall(r'class="tag" style="font-size:([0-9.]+)px"', html_text)
        assert len(spans) == 3
        sizes = [float(s) for s in spans]
        assert sizes[0] == max(sizes)  # heaviest tag leads and is largest

    def test_embed_wraps_glued_runs(self, client, dataset):
        resp = client.post(
            f"/datasets/{dataset}/clouds",
            json={
                "group_dims": ["location"],
                "aggregator": "COUNT",
                "k": 3,
                "clustering_dims": ["product"],
                "similarity": "cosine",
                "layout": {"kind": "NN", "glue_threshold": 0.5},
            },
        )
        permalink = resp.json()["permalink"]
        html_text = client.get(f"{permalink}/embed").text
        assert 'white-space:nowrap' in html_text
