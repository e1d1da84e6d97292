"""Content-addressed result cache for CLI computations."""

from __future__ import annotations

import contextlib
import hashlib
import json
import os
import platform
import sys
import tempfile
from typing import Any, Callable, IO, Iterator

from log import get_logger
from poly import canonical_dumps

SYSTEM = platform.system()
log = get_logger("cache")


def default_cache_dir() -> str:
  """Return a sensible default cache folder per platform."""
  home = os.path.expanduser("~")

  if SYSTEM == "Windows":
    local = os.environ.get("LOCALAPPDATA", os.path.join(home, "AppData", "Local"))
    return os.path.join(local, "KNLattice", "cache")
  elif SYSTEM == "Darwin":
    return os.path.join(home, "Library", "Caches", "knlattice")
  else:
    xdg = os.environ.get("XDG_CACHE_HOME", os.path.join(home, ".cache"))
    return os.path.join(xdg, "knlattice")


def cache_key(command: str, inputs: dict[str, Any], version: str) -> str:
  payload = canonical_dumps({"command": command, "inputs": inputs, "version": version})
  return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _lock(fh: IO[str]) -> None:
  if sys.platform == "win32":
    import msvcrt
    msvcrt.locking(fh.fileno(), msvcrt.LK_LOCK, 1)
  else:
    import fcntl
    fcntl.flock(fh, fcntl.LOCK_EX)


def _unlock(fh: IO[str]) -> None:
  if sys.platform == "win32":
    import msvcrt
    fh.seek(0)
    msvcrt.locking(fh.fileno(), msvcrt.LK_UNLCK, 1)
  else:
    import fcntl
    fcntl.flock(fh, fcntl.LOCK_UN)


class CacheStore:
  """Entries live at ``<root>/<first two hex chars>/<sha256>.json``."""

  def __init__(self, root: str) -> None:
    self.root = os.path.expanduser(root)

  def path_for(self, key: str) -> str:
    return os.path.join(self.root, key[:2], f"{key}.json")

  @contextlib.contextmanager
  def locked(self, key: str) -> Iterator[None]:
    """Serialize access to one key across processes."""
    path = self.path_for(key)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path + ".lock", "a+") as fh:
      _lock(fh)
      try:
        yield
      finally:
        _unlock(fh)

  def get(self, key: str) -> Any | None:
    path = self.path_for(key)
    if not os.path.exists(path):
      log.debug("Cache miss: %s", key)
      return None
    try:
      with open(path, encoding="utf-8") as f:
        value = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
      log.warning("Corrupt cache entry %s, recomputing: %s", path, e)
      return None
    log.debug("Cache hit: %s", key)
    return value

  def put(self, key: str, value: Any) -> None:
    path = self.path_for(key)
    folder = os.path.dirname(path)
    try:
      os.makedirs(folder, exist_ok=True)
      fd, tmp = tempfile.mkstemp(dir=folder, suffix=".tmp")
      with os.fdopen(fd, "w", encoding="utf-8") as f:
        f.write(canonical_dumps(value))
      os.replace(tmp, path)
    except OSError as e:
      log.error("Failed to write cache entry %s: %s", path, e)

  def get_or_compute(self, key: str, compute: Callable[[], Any]) -> Any:
    with self.locked(key):
      value = self.get(key)
      if value is None:
        value = compute()
        self.put(key, value)
      return value
