import os

import pytest

# tests must not pick up a developer's cache directory
os.environ.pop("RMT_TW_CACHE", None)
os.environ.pop("RMT_TW_WORKERS", None)

from wishart_tw.service import tracy_widom_service as tw_service  # noqa: E402
from wishart_tw.settings import Settings  # noqa: E402


@pytest.fixture(scope="session")
def settings():
    return Settings()


@pytest.fixture(scope="session")
def painleve(settings):
    """One Hastings-McLeod solve shared by the whole session."""
    return tw_service.default_solution(settings)


@pytest.fixture(scope="session")
def tw1(painleve):
    return tw_service.TwCdf("TW1", painleve)


@pytest.fixture(scope="session")
def tw2(painleve):
    return tw_service.TwCdf("TW2", painleve)
