import random

import pytest

from tagcube import (
    Aggregator,
    CloudQuery,
    Filter,
    FilterOp,
    RollupSpec,
    approx_cloud,
    build_cuboid,
    exact_cloud,
    false_negative_index,
    false_positive_index,
    materialize_iceberg,
    relative_gain,
)
from tagcube.errors import DimensionNotInIceberg, NonPositiveBaseline

from conftest import ALL_AGG_KINDS, make_aggregator, random_fact_table


class TestMaterialize:
    def test_top3_cells_of_location_product(self, sales_table, sales_schema):
        berg = materialize_iceberg(
            sales_table, sales_schema, ["location", "product"], Aggregator.count(), 3
        )
        assert berg.cells == {
            ("Montreal", "shoe"): 2,
            ("New York", "chair"): 2,
            ("Paris", "shoe"): 2,
        }

    def test_limit_beyond_cells_keeps_everything(self, sales_table, sales_schema):
        full = build_cuboid(sales_table, sales_schema, ["location", "product"], Aggregator.count())
        berg = materialize_iceberg(
            sales_table, sales_schema, ["location", "product"], Aggregator.count(), 100
        )
        assert berg.cells == full.cells

    def test_limit_one_keeps_the_unique_max(self, sales_table, sales_schema):
        berg = materialize_iceberg(sales_table, sales_schema, ["location"], Aggregator.count(), 1)
        assert berg.cells == {("Paris",): 3}

    def test_retained_dominate_discarded(self, sales_table, sales_schema):
        full = build_cuboid(sales_table, sales_schema, ["location", "time"], Aggregator.count())
        berg = materialize_iceberg(
            sales_table, sales_schema, ["location", "time"], Aggregator.count(), 4
        )
        dropped = set(full.cells) - set(berg.cells)
        if dropped:
            assert min(berg.cells.values()) >= max(full.cells[k] for k in dropped)

    def test_monotone_containment(self):
        rng = random.Random(13)
        for _ in range(20):
            table, schema = random_fact_table(rng, max_rows=300, max_dims=3)
            agg = make_aggregator(rng.choice(ALL_AGG_KINDS))
            dims = list(schema.dimensions)
            big = materialize_iceberg(table, schema, dims, agg, 50)
            small = big.shrink(20)
            tiny = small.shrink(5)
            assert set(tiny.cells) <= set(small.cells) <= set(big.cells)
            fresh = materialize_iceberg(table, schema, dims, agg, 20)
            assert small.cells == fresh.cells

    def test_shrink_cannot_grow(self, sales_table, sales_schema):
        berg = materialize_iceberg(sales_table, sales_schema, ["location"], Aggregator.count(), 3)
        with pytest.raises(ValueError):
            berg.shrink(10)


class TestApproxCloud:
    def test_reaggregated_weights_differ_but_coords_match(self, sales_table, sales_schema):
        berg = materialize_iceberg(
            sales_table, sales_schema, ["location", "product"], Aggregator.count(), 3
        )
        query = CloudQuery(group_dims=("location",), aggregator=Aggregator.count(), k=3)
        approx = approx_cloud(berg, query)
        assert approx.approximate
        assert {(t.term, t.weight) for t in approx} == {
            ("Montreal", 2),
            ("New York", 2),
            ("Paris", 2),
        }
        exact = exact_cloud(sales_table, sales_schema, query)
        assert not exact.approximate
        assert [(t.term, t.weight) for t in exact] == [
            ("Paris", 3),
            ("Montreal", 2),
            ("New York", 2),
        ]
        # same coordinate sets, so both quality indexes are clean
        assert approx.coord_set() == exact.coord_set()

    def test_filter_matching_nothing_is_empty_but_flagged(self, sales_table, sales_schema):
        berg = materialize_iceberg(
            sales_table, sales_schema, ["location", "product"], Aggregator.count(), 3
        )
        query = CloudQuery(
            group_dims=("location",),
            aggregator=Aggregator.count(),
            filters=(Filter(op=FilterOp.SLICE, dim="product", values=("bicycle",)),),
            k=3,
        )
        cloud = approx_cloud(berg, query)
        assert len(cloud) == 0
        assert cloud.approximate

    def test_unknown_dimension_raises(self, sales_table, sales_schema):
        berg = materialize_iceberg(sales_table, sales_schema, ["location"], Aggregator.count(), 5)
        query = CloudQuery(group_dims=("product",), aggregator=Aggregator.count(), k=3)
        with pytest.raises(DimensionNotInIceberg):
            approx_cloud(berg, query)

    def test_rollup_answered_from_iceberg(self, sales_table, sales_schema_with_country):
        schema = sales_schema_with_country
        berg = materialize_iceberg(
            sales_table, schema, schema.dimensions, Aggregator.count(), 100
        )
        query = CloudQuery(
            group_dims=("Country",),
            aggregator=Aggregator.count(),
            rollups=(RollupSpec(child="location", parent="Country"),),
            k=5,
        )
        approx = approx_cloud(berg, query)
        assert {(t.term, t.weight) for t in approx} == {
            ("Canada", 4),
            ("France", 4),
            ("USA", 3),
        }
        exact = exact_cloud(sales_table, schema, query)
        assert [(t.term, t.weight) for t in approx] == [(t.term, t.weight) for t in exact]

    def test_via_filter_selects_children_of_a_parent(self, sales_table, sales_schema_with_country):
        schema = sales_schema_with_country
        berg = materialize_iceberg(
            sales_table, schema, schema.dimensions, Aggregator.count(), 100
        )
        query = CloudQuery(
            group_dims=("location",),
            aggregator=Aggregator.count(),
            filters=(
                Filter(op=FilterOp.DICE, dim="location", values=("Canada",), via="Country"),
            ),
            k=10,
        )
        cloud = approx_cloud(berg, query)
        assert {t.term for t in cloud} == {"Montreal", "Quebec", "Ontario"}


class TestSaturationAndUnderApproximation:
    def test_exact_at_saturation_spot_check(self):
        rng = random.Random(17)
        for _ in range(10):
            # non-negative measures: tag weights must be >= 0 by definition
            table, schema = random_fact_table(rng, max_rows=200, max_dims=3, nonneg=True)
            agg = make_aggregator(rng.choice(ALL_AGG_KINDS))
            dims = list(schema.dimensions)
            full = build_cuboid(table, schema, dims, agg)
            berg = materialize_iceberg(table, schema, dims, agg, max(len(full), 1))
            group = tuple(rng.sample(dims, k=rng.randint(1, len(dims))))
            query = CloudQuery(group_dims=group, aggregator=agg, k=rng.randint(1, 12))
            a = approx_cloud(berg, query)
            e = exact_cloud(table, schema, query)
            assert [(t.coords, t.weight) for t in a] == [(t.coords, t.weight) for t in e]

    def test_additive_weights_never_exceed_exact(self):
        rng = random.Random(19)
        for _ in range(15):
            table, schema = random_fact_table(rng, max_rows=300, max_dims=3, nonneg=True)
            agg = rng.choice([Aggregator.count(), Aggregator.sum("m1")])
            dims = list(schema.dimensions)
            limit = rng.randint(1, 30)
            berg = materialize_iceberg(table, schema, dims, agg, limit)
            group = tuple(rng.sample(dims, k=rng.randint(1, len(dims))))
            query = CloudQuery(group_dims=group, aggregator=agg, k=20)
            approx = approx_cloud(berg, query)
            everything = CloudQuery(group_dims=group, aggregator=agg, k=10**6)
            exact = {t.coords: t.weight for t in exact_cloud(table, schema, everything)}
            for t in approx:
                assert t.weight <= exact[t.coords] + 1e-9


class TestQualityTrend:
    def test_indexes_shrink_as_limit_grows(self):
        """Mean quality indexes over seeded skewed cubes trend down as the
        iceberg keeps more cells. Cardinalities are mid-range so even the
        smallest limit projects onto more values than the cloud size,
        which is the regime where false positives can occur at all."""
        from tagcube import ZipfSpec, as_fact_table
        from tagcube.synth import default_schema

        limits = (150, 600, 1200, 4800, 19600)
        agg = Aggregator.count()
        fp_sums = {l: 0.0 for l in limits}
        fn_sums = {l: 0.0 for l in limits}
        samples = 0
        for seed in range(20):
            spec = ZipfSpec(
                dims=4, cardinalities=(60, 80, 100, 120), rows=30_000, skew=1.2, seed=seed
            )
            table = as_fact_table(spec)
            schema = default_schema(table)
            base = materialize_iceberg(table, schema, schema.dimensions, agg, max(limits))
            for dim in schema.dimensions:
                query = CloudQuery(group_dims=(dim,), aggregator=agg, k=9)
                exact = exact_cloud(table, schema, query)
                samples += 1
                for limit in limits:
                    approx = approx_cloud(base.shrink(limit), query)
                    fp_sums[limit] += false_positive_index(approx, exact)
                    fn_sums[limit] += false_negative_index(approx, exact)
        fp_means = [fp_sums[l] / samples for l in limits]
        fn_means = [fn_sums[l] / samples for l in limits]
        slack = 1e-4  # platform float wobble only; the trend itself is clear
        for prev, nxt in zip(fp_means, fp_means[1:]):
            assert nxt <= prev + slack, fp_means
        for prev, nxt in zip(fn_means, fn_means[1:]):
            assert nxt <= prev + slack, fn_means
        assert fp_means[-1] < fp_means[0]
        assert fn_means[-1] < fn_means[0]


class TestRelativeGain:
    def test_formula(self):
        assert relative_gain(10, 1) == pytest.approx(0.9)

    def test_no_gain(self):
        assert relative_gain(4.2, 4.2) == 0.0

    def test_slower_approximation_is_negative(self):
        assert relative_gain(1.0, 2.0) == pytest.approx(-1.0)

    def test_non_positive_baseline(self):
        with pytest.raises(NonPositiveBaseline):
            relative_gain(0.0, 1.0)
