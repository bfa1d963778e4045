from pathlib import Path
from typing import Any, Literal

from diskcache import Cache as DiskCache

from qmc_hyperinterp.settings import settings


class Cache:
    """Key-value memo, persisted with diskcache or kept in memory"""

    storage_type: Literal["disk", "memory"] = "disk"
    client: DiskCache | dict

    def __init__(
        self,
        storage_type: Literal["disk", "memory"] | None = None,
        directory: Path | None = None,
    ):
        if storage_type is None:
            storage_type = "disk" if settings.cache.use_disk_cache else "memory"
        self.storage_type = storage_type

        if self.storage_type == "disk":
            directory = directory or settings.cache.directory / "memo"
            self.client = DiskCache(str(directory))
        else:
            self.client = {}

    def get(self, key: str) -> Any | None:
        return self.client.get(key)

    def set(self, key: str, value: Any) -> None:
        if self.storage_type == "disk":
            self.client.set(key, value)
        else:
            self.client[key] = value

    def delete(self, key: str) -> None:
        if self.storage_type == "disk":
            self.client.delete(key)
        else:
            self.client.pop(key, None)

    def clear(self) -> None:
        self.client.clear()

    def __contains__(self, key: str) -> bool:
        return key in self.client


_cache: Cache | None = None


def get_cache() -> Cache:
    global _cache
    if _cache is None:
        _cache = Cache()
    return _cache
