import pytest

from wishart_tw.errors import DomainError
from wishart_tw.service.table_service import (
    REFERENCE_TABLES,
    ExperimentConfig,
    TableService,
    column_seed,
    reference_column,
)
from wishart_tw.settings import TABLE_QUANTILES


class TestExperimentConfig:
    def test_defaults(self):
        config = ExperimentConfig(dims=[[5, 200]])
        assert config.dims == [(5, 200)]
        assert config.which == "TW1"
        assert config.sampling_path == "tridiagonal"
        assert config.to_dict()["path"] == "tridiagonal"

    def test_complex_uses_dense_path(self):
        config = ExperimentConfig(dims=[(5, 5)], field="complex")
        assert config.which == "TW2"
        assert config.sampling_path == "dense"

    def test_variant_alias_is_normalized(self):
        assert ExperimentConfig(dims=[(5, 5)], variant="edge").variant == "section4"

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"dims": []},
            {"dims": [(5, 5)], "reps": 0},
            {"dims": [(5, 5)], "workers": 0},
            {"dims": [(5, 5)], "variant": "exact"},
            {"dims": [(5, 5)], "field": "quaternion"},
            {"dims": [(5, 5)], "reference_quantiles": (1.0, 0.0)},
            {"dims": [(5, 5)], "path": "sparse"},
            {"dims": [(5, 5)], "field": "complex", "path": "tridiagonal"},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(DomainError):
            ExperimentConfig(**kwargs)


class TestReferenceData:
    def test_every_table_shape_has_a_column(self):
        for dims in REFERENCE_TABLES["table1"] + REFERENCE_TABLES["table2"]:
            column = reference_column(dims)
            assert column is not None and len(column) == len(TABLE_QUANTILES)
            assert list(column) == sorted(column)

    def test_either_orientation(self):
        assert reference_column((200, 5)) == reference_column((5, 200))
        assert reference_column((7, 7)) is None

    def test_column_seed_depends_on_shape(self):
        assert column_seed(1, 5, 200) == column_seed(1, 5, 200)
        assert column_seed(1, 5, 200) != column_seed(1, 200, 5)
        assert column_seed(1, 5, 200) != column_seed(2, 5, 200)


class TestBuildTable:
    def test_columns_do_not_depend_on_neighbours(self, settings):
        service = TableService(settings)
        alone = service.build_table(ExperimentConfig(dims=[(10, 40)], reps=200, seed=5))
        together = service.build_table(ExperimentConfig(dims=[(5, 5), (10, 40)], reps=200, seed=5))
        assert alone.columns["10x40"] == together.columns["10x40"]

    def test_columns_are_cdfs(self, settings):
        result = TableService(settings).build_table(ExperimentConfig(dims=[(8, 30)], reps=300, seed=9))
        column = result.columns["8x30"]
        assert all(0.0 <= v <= 1.0 for v in column)
        assert column == sorted(column)
        assert result.errors == {}
        assert list(result.durations) == ["8x30"]
