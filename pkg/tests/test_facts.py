import pytest

from tagcube import (
    ColumnKind,
    DatasetRegistry,
    IngestOptions,
    attach_hierarchy,
    define_schema,
    ingest_csv,
    read_hierarchy_csv,
)
from tagcube.errors import (
    ConflictingMapping,
    DuplicateColumnName,
    EmptyDimensionSet,
    EmptyInput,
    EmptyMeasureSet,
    IncompleteMapping,
    NonNumericMeasure,
    OverlappingRoles,
    RaggedRows,
    UnknownColumn,
    UnknownDataset,
    UnknownDimension,
    WrongColumnKind,
)

from conftest import CITY_COUNTRY, SAMPLE_SALES_CSV


class TestIngest:
    def test_sales_sample_roles_and_rows(self, sales_table):
        assert sales_table.row_count == 11
        assert sales_table.names_of_kind(ColumnKind.DIMENSION) == (
            "location",
            "time",
            "salesman",
            "product",
        )
        assert sales_table.names_of_kind(ColumnKind.MEASURE) == ("cost", "profit")

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            ingest_csv(b"")
        with pytest.raises(EmptyInput):
            ingest_csv("   \n  \n")

    def test_ragged_row_reports_data_row_index(self):
        text = "a,b\n1,2\n1,2,3\n1,2\n"
        with pytest.raises(RaggedRows) as err:
            ingest_csv(text)
        assert err.value.row == 2

    def test_duplicate_column_name(self):
        with pytest.raises(DuplicateColumnName):
            ingest_csv("a,a\n1,2\n")

    def test_deterministic_identical_bytes(self):
        t1 = ingest_csv(SAMPLE_SALES_CSV)
        t2 = ingest_csv(SAMPLE_SALES_CSV)
        assert t1 == t2
        assert t1.id == t2.id

    def test_measure_hint_overrides_inference(self):
        text = "code,amount\n1,5\n2,6\n"
        default = ingest_csv(text)
        assert default.column("code").kind is ColumnKind.MEASURE
        hinted = ingest_csv(
            text, IngestOptions(measure_hint={"code": ColumnKind.DIMENSION})
        )
        assert hinted.column("code").kind is ColumnKind.DIMENSION
        assert hinted.column("code").values == ("1", "2")

    def test_missing_measure_cell_rejects_file(self):
        text = "d,m\nx,1\ny,\n"
        # the column no longer parses all-numeric, so it falls back to dimension
        assert ingest_csv(text).column("m").kind is ColumnKind.DIMENSION
        # forcing it to be a measure surfaces the hole
        with pytest.raises(NonNumericMeasure):
            ingest_csv(text, IngestOptions(measure_hint={"m": ColumnKind.MEASURE}))
        filled = ingest_csv(
            text,
            IngestOptions(measure_hint={"m": ColumnKind.MEASURE}, missing_measure_default=0.0),
        )
        assert filled.column("m").values == (1.0, 0.0)

    def test_missing_dimension_cell_is_empty_string(self):
        table = ingest_csv("d,m\n,1\nx,2\n")
        assert table.column("d").values == ("", "x")

    def test_non_finite_numbers_stay_dimensions(self):
        table = ingest_csv("d,m\nnan,1\ninf,2\n")
        assert table.column("d").kind is ColumnKind.DIMENSION

    def test_custom_delimiter_and_quoting(self):
        table = ingest_csv('a;b\n"x;y";2\n', IngestOptions(delimiter=";"))
        assert table.column("a").values == ("x;y",)
        assert table.column("b").kind is ColumnKind.MEASURE

    def test_headerless_columns_get_names(self):
        table = ingest_csv("x,1\ny,2\n", IngestOptions(header_row=False))
        assert table.column_names == ("col1", "col2")
        assert table.row_count == 2


class TestDefineSchema:
    def test_sales_schema(self, sales_table):
        schema = define_schema(
            sales_table, ["location", "time", "salesman", "product"], ["cost", "profit"]
        )
        assert schema.dimensions == ("location", "time", "salesman", "product")
        assert schema.measures == ("cost", "profit")
        assert schema.hierarchies == ()

    def test_overlapping_roles(self, sales_table):
        with pytest.raises(OverlappingRoles):
            define_schema(sales_table, ["location"], ["location"])

    def test_empty_dimension_set(self, sales_table):
        with pytest.raises(EmptyDimensionSet):
            define_schema(sales_table, [], ["cost"])

    def test_empty_measure_set(self, sales_table):
        with pytest.raises(EmptyMeasureSet):
            define_schema(sales_table, ["location"], [])

    def test_unknown_column(self, sales_table):
        with pytest.raises(UnknownColumn):
            define_schema(sales_table, ["location", "nope"], ["cost"])

    def test_wrong_column_kind(self, sales_table):
        with pytest.raises(WrongColumnKind):
            define_schema(sales_table, ["cost"], ["profit"])
        with pytest.raises(WrongColumnKind):
            define_schema(sales_table, ["location"], ["product"])


class TestAttachHierarchy:
    def test_city_country_mapping_covers_everything(self, sales_table, sales_schema):
        schema = attach_hierarchy(sales_table, sales_schema, "location", "Country", CITY_COUNTRY)
        assert len(schema.hierarchies) == 1
        assert schema.hierarchy("location", "Country").mapping["Paris"] == "France"
        # the original is unchanged
        assert sales_schema.hierarchies == ()

    def test_incomplete_mapping_lists_uncovered(self, sales_table, sales_schema):
        partial = {k: v for k, v in CITY_COUNTRY.items() if k != "Detroit"}
        with pytest.raises(IncompleteMapping) as err:
            attach_hierarchy(sales_table, sales_schema, "location", "Country", partial)
        assert err.value.uncovered == ("Detroit",)

    def test_identity_mapping_is_valid(self, sales_table, sales_schema):
        identity = {city: city for city in CITY_COUNTRY}
        schema = attach_hierarchy(sales_table, sales_schema, "location", "City", identity)
        assert schema.hierarchy("location", "City") is not None

    def test_unknown_dimension(self, sales_table, sales_schema):
        with pytest.raises(UnknownDimension):
            attach_hierarchy(sales_table, sales_schema, "cost", "Country", CITY_COUNTRY)

    def test_repeated_attach_is_pure(self, sales_table, sales_schema):
        a = attach_hierarchy(sales_table, sales_schema, "location", "Country", CITY_COUNTRY)
        b = attach_hierarchy(sales_table, sales_schema, "location", "Country", CITY_COUNTRY)
        assert a == b

    def test_parent_name_may_not_shadow_a_column(self, sales_table, sales_schema):
        with pytest.raises(DuplicateColumnName):
            attach_hierarchy(sales_table, sales_schema, "location", "time", CITY_COUNTRY)


class TestHierarchyCsv:
    def test_round_trip(self):
        mapping = read_hierarchy_csv("Montreal,Canada\nParis,France\n")
        assert mapping == {"Montreal": "Canada", "Paris": "France"}

    def test_conflicting_rows(self):
        with pytest.raises(ConflictingMapping):
            read_hierarchy_csv("Montreal,Canada\nMontreal,France\n")

    def test_wrong_width(self):
        with pytest.raises(RaggedRows):
            read_hierarchy_csv("Montreal,Canada,extra\n")


class TestRegistry:
    def test_add_get_and_distinct_ids(self, sales_table):
        registry = DatasetRegistry()
        a = registry.add(sales_table)
        b = registry.add(sales_table)
        assert a != b  # no dedup: re-uploads get fresh ids
        assert registry.get(a) is sales_table
        assert set(registry.ids()) == {a, b}

    def test_unknown_dataset(self):
        with pytest.raises(UnknownDataset):
            DatasetRegistry().get("missing")
