import pytest

from qmc_hyperinterp.settings import settings
from qmc_hyperinterp.weights_index import ProductWeights


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Every test gets its own cache directory and an in-memory memo"""
    monkeypatch.setattr(settings.cache, "directory", tmp_path / "cache")
    monkeypatch.setattr(settings.cache, "use_disk_cache", False)
    monkeypatch.setattr("qmc_hyperinterp.core.cache._cache", None)
    yield tmp_path / "cache"


@pytest.fixture
def unit_weights():
    return ProductWeights.from_spec(2, "const:1")


@pytest.fixture
def decaying_weights():
    return ProductWeights.from_spec(2, "pow:1:2")
