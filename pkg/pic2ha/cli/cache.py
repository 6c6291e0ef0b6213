# Content-addressed on-disk cache for resolutions
import hashlib
import json
import os
import tempfile

from pathlib import Path
from typing import Any, Optional

from .. import __version__
from ..logger import get_logger
from .models import CacheEntry

_logger = get_logger("pic2ha.cache")


def _stable_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def cache_key(tool: str, inputs: dict) -> str:
    """Hex digest of the canonical serialization of a tool invocation."""
    blob = _stable_dumps({"tool": tool, "version": __version__, "inputs": inputs})
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class ResolutionCache:
    """One JSON file per key; a missing or corrupt file is a miss."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, key: str) -> Optional[CacheEntry]:
        path = self.path(key)
        if not path.exists():
            _logger.debug("CacheMiss", {"key": key})
            return None
        try:
            entry = CacheEntry.from_dict(json.loads(path.read_text(encoding="utf-8")))
        except (OSError, ValueError, KeyError, TypeError) as e:
            _logger.warning("CacheEntryCorrupt", {"key": key, "error": str(e)})
            return None
        if entry.key != key:
            _logger.warning("CacheEntryCorrupt", {"key": key, "error": "key mismatch"})
            return None
        _logger.debug("CacheHit", {"key": key})
        return entry

    def put(self, entry: CacheEntry) -> Path:
        path = self.path(entry.key)
        fd, tmp = tempfile.mkstemp(prefix=f".{entry.key}.", suffix=".tmp", dir=str(self.root))
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                f.write(_stable_dumps(entry.to_dict()))
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        _logger.debug("CacheWrite", {"key": entry.key, "path": str(path)})
        return path
