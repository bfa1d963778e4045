import numpy as np
import pytest

from qmc_hyperinterp.core import cache as cache_module
from qmc_hyperinterp.core.cache import Cache, get_cache
from qmc_hyperinterp.core.records import (
    CoefficientFile,
    VectorRecordStore,
    format_coeffs,
    format_number,
    parse_coeffs,
)
from qmc_hyperinterp.settings import Settings, settings


class TestCache:
    def test_memory_cache(self):
        cache = Cache(storage_type="memory")
        cache.set("kv_fourier:3", 1 + 2j)
        assert cache.get("kv_fourier:3") == 1 + 2j
        assert "kv_fourier:3" in cache
        cache.delete("kv_fourier:3")
        assert cache.get("kv_fourier:3") is None
        cache.delete("missing")

    def test_disk_cache(self, tmp_path):
        cache = Cache(storage_type="disk", directory=tmp_path / "memo")
        cache.set("key", 0.25)
        cache.clear()
        assert cache.get("key") is None

        cache.set("key", 0.25)
        cache.client.close()
        reopened = Cache(storage_type="disk", directory=tmp_path / "memo")
        assert reopened.get("key") == 0.25

    def test_default_storage_follows_settings(self, monkeypatch, isolated_cache):
        assert Cache().storage_type == "memory"
        monkeypatch.setattr(settings.cache, "use_disk_cache", True)
        cache = Cache()
        assert cache.storage_type == "disk"
        assert (isolated_cache / "memo").exists()

    def test_singleton(self):
        first = get_cache()
        assert get_cache() is first
        assert cache_module._cache is first


class TestVectorRecords:
    def test_rank1_prefix_lookup(self, tmp_path):
        store = VectorRecordStore(tmp_path / "vectors.txt")
        assert store.lookup_rank1("R", 127, 2, 2, "pow:1:2") is None
        store.store_rank1("R", 127, 2, "pow:1:2", (1, 47, 22, 93))
        assert store.lookup_rank1("R", 127, 2, 2, "pow:1:2") == (1, 47)
        assert store.lookup_rank1("R", 127, 4, 2.0, "pow:1:2") == (1, 47, 22, 93)
        assert store.lookup_rank1("R", 127, 5, 2, "pow:1:2") is None
        assert store.lookup_rank1("S", 127, 2, 2, "pow:1:2") is None
        assert store.lookup_rank1("R", 127, 2, 1.5, "pow:1:2") is None

    def test_rank1_no_duplicates(self, tmp_path):
        store = VectorRecordStore(tmp_path / "vectors.txt")
        store.store_rank1("S", 31, 1, "const:1", (1, 12, 5))
        store.store_rank1("S", 31, 1, "const:1", (1, 12))
        assert store.path.read_text() == "S 31 3 1 const:1 1 12 5\n"

    def test_poly_records(self, tmp_path):
        store = VectorRecordStore(tmp_path / "vectors.txt")
        p = (1, 1, 0, 1)
        q = ((1,), (0, 1, 1), (1, 0, 1))
        store.store_poly(2, 3, p, 2, "pow:1:2", q)
        assert store.lookup_poly(2, 3, p, 2, 2, "pow:1:2") == q[:2]
        assert store.lookup_poly(2, 3, (1, 0, 1, 1), 2, 2, "pow:1:2") is None
        assert store.path.read_text().split()[:4] == ["poly", "2", "3", "[1,1,0,1]"]

    def test_comments_skipped(self, tmp_path):
        path = tmp_path / "vectors.txt"
        path.write_text("# hand-edited\n\nrecon 64 2 1 const:1 1 9\n")
        assert VectorRecordStore(path).lookup_rank1("recon", 64, 2, 1, "const:1") == (1, 9)


class TestCoefficientFile:
    def test_write_and_load(self, tmp_path):
        path = tmp_path / "coefficients.txt"
        CoefficientFile(path, tol=1e-10).write("kv", {0: 1.0 + 0j, 1: 0.1 - 0.2j})
        assert path.read_text().splitlines()[0] == "# tol=1e-10"
        assert CoefficientFile(path).load() == {("kv", 0): 1 + 0j, ("kv", 1): 0.1 - 0.2j}

    def test_existing_keys_kept(self, tmp_path):
        path = tmp_path / "coefficients.txt"
        store = CoefficientFile(path)
        store.write("kv", {1: 0.5j})
        store.write("kv", {1: 9.0 + 0j, 2: 0.25 + 0j})
        loaded = store.load()
        assert loaded[("kv", 1)] == 0.5j
        assert loaded[("kv", 2)] == 0.25

    def test_numpy_values_written_as_plain_floats(self, tmp_path):
        path = tmp_path / "coefficients.txt"
        values = np.array([0.1 - 1.738266398496882j, 2.0 + 0j], dtype=np.complex128)
        CoefficientFile(path).write("kv", {0: values[0], 1: values[1]})
        assert "np." not in path.read_text()
        assert CoefficientFile(path).load() == {("kv", 0): values[0], ("kv", 1): 2 + 0j}

    def test_missing_file(self, tmp_path):
        assert CoefficientFile(tmp_path / "absent.txt").load() == {}


class TestFormatting:
    @pytest.mark.parametrize(
        "value,text", [(2, "2"), (2.0, "2"), (1.5, "1.5"), (0.1, "0.1"), (-3.0, "-3")]
    )
    def test_format_number(self, value, text):
        assert format_number(value) == text

    def test_coefficient_tokens(self):
        assert format_coeffs((1, 0, 2)) == "[1,0,2]"
        assert parse_coeffs("[1,0,2]") == (1, 0, 2)
        assert parse_coeffs("[]") == ()


class TestSettings:
    def test_defaults(self):
        fresh = Settings()
        assert fresh.compute.tie_rtol == 1e-12
        assert fresh.cache.use_vector_cache is False
        assert fresh.cache.vector_path.name == "vectors.txt"

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("QMCH_COMPUTE__TIE_RTOL", "1e-8")
        monkeypatch.setenv("QMCH_LOGGING__LEVEL", "DEBUG")
        fresh = Settings()
        assert fresh.compute.tie_rtol == 1e-8
        assert fresh.logging.level == "DEBUG"

    def test_eigh_dimension_clamped(self):
        fresh = Settings(compute={"max_gram_dim": 100, "eigh_fallback_dim": 512})
        assert fresh.compute.eigh_fallback_dim == 100

    def test_invalid_cap(self):
        with pytest.raises(ValueError):
            Settings(compute={"cardinality_cap": 0})
