"""
Monte Carlo reproductions of the published quantile tables (10^4 draws per column).

Published columns are themselves simulations of the same size, so agreement is
checked against a band a few standard errors wide.
"""

import numpy as np
import pytest

from wishart_tw.service.table_service import (
    ExperimentConfig,
    TableService,
    label,
    reference_column,
)
from wishart_tw.settings import TABLE_QUANTILES

pytestmark = pytest.mark.slow

COLUMN_TOLERANCE = 0.03
MEAN_TOLERANCE = 0.012


@pytest.fixture(scope="module")
def service(settings):
    return TableService(settings)


def _column(service, dims, variant="adjusted"):
    result = service.build_table(ExperimentConfig(dims=[dims], reps=10_000, variant=variant))
    return dict(zip(TABLE_QUANTILES, result.columns[label(dims)]))


class TestNamedPoints:
    def test_5x200(self, service):
        column = _column(service, (5, 200))
        assert column[0.45] == pytest.approx(0.911, abs=0.015)
        assert column[0.98] == pytest.approx(0.959, abs=0.015)

    def test_10x1000_median(self, service):
        assert _column(service, (10, 1000))[-1.27] == pytest.approx(0.506, abs=0.025)

    def test_10x10_left_tail(self, service):
        assert _column(service, (10, 10))[-3.18] == pytest.approx(0.018, abs=0.012)


@pytest.mark.parametrize("dims", [(5, 200), (10, 1000), (30, 5000), (5, 5), (10, 10), (10, 40)])
def test_column_matches_published(service, dims):
    simulated = np.array(list(_column(service, dims).values()))
    published = np.array(reference_column(dims))
    assert np.max(np.abs(simulated - published)) <= COLUMN_TOLERANCE
    assert np.mean(np.abs(simulated - published)) <= MEAN_TOLERANCE


def test_original_centering_is_worse_for_thin_shapes(service):
    dims = (5, 200)
    published = np.array(reference_column(dims))
    adjusted = np.array(list(_column(service, dims, "adjusted").values()))
    original = np.array(list(_column(service, dims, "original").values()))
    assert np.mean(np.abs(original - published)) > np.mean(np.abs(adjusted - published))


def test_large_column_at_reduced_reps(service):
    dims = (50, 50000)
    result = service.build_table(ExperimentConfig(dims=[dims], reps=1000))
    simulated = np.array(result.columns[label(dims)])
    assert np.max(np.abs(simulated - np.array(reference_column(dims)))) <= 0.05
