"""On-disk cache for lattices and forest enumerations.

One JSON file per arrangement, named by the arrangement key and the package
version.  SNF results are never cached; they are cheap to recompute.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

from .buildcore import BuildingSet, Lattice, closure
from .exactlinalg import rref
from .families import Arrangement, subspace_to_json

CACHE_VERSION = "realdcp-cache-1"
ENV_VAR = "REALDCP_CACHE"

log = logging.getLogger(__name__)


def arrangement_key(arr: Arrangement) -> str:
    gens = sorted({s.key for s in arr.generators if s.dim})
    h = hashlib.sha256(str(arr.ambient_dim).encode())
    for k in gens:
        h.update(b"#" + k)
    return h.hexdigest()


class DiskCache:
    def __init__(self, directory: str | os.PathLike | None):
        self.directory = Path(directory) if directory else None

    @classmethod
    def from_env(cls, explicit: str | None):
        return cls(explicit or os.environ.get(ENV_VAR) or None)

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.{CACHE_VERSION}.json"

    def load(self, arr: Arrangement, max_lattice: int) -> BuildingSet | None:
        if self.directory is None:
            return None
        key = arrangement_key(arr)
        path = self._path(key)
        try:
            data = json.loads(path.read_text())
        except (OSError, ValueError):
            return None
        if data.get("version") != CACHE_VERSION or data.get("key") != key:
            log.warning("ignoring stale cache entry %s", path)
            return None
        n = arr.ambient_dim
        lattice = [rref(rows, n) for rows in data["lattice"]]
        building = [rref(rows, n) for rows in data["building"]]
        if len(lattice) > max_lattice:
            return None
        pre = Lattice(building, n, max_lattice, building=True, elements=lattice)
        g = BuildingSet(n, tuple(building), max_lattice, _prebuilt=pre)
        forests = g.cache.setdefault("forests", {})
        for entry in data.get("forests", []):
            forests[(entry["root"], entry["m"])] = [tuple(f) for f in entry["list"]]
        return g

    def store(self, arr: Arrangement, g: BuildingSet) -> None:
        if self.directory is None:
            return
        self.directory.mkdir(parents=True, exist_ok=True)
        key = arrangement_key(arr)
        data = {
            "version": CACHE_VERSION,
            "key": key,
            "lattice": [subspace_to_json(s) for s in g.lattice.elements],
            "building": [subspace_to_json(s) for s in g.elements],
            "forests": [{"root": a, "m": m, "list": [list(f) for f in fl]}
                        for (a, m), fl in sorted(g.cache.get("forests", {}).items())],
        }
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(data, fh, separators=(",", ":"))
        os.replace(tmp, self._path(key))


def building_set_for(arr: Arrangement, max_lattice: int, cache: DiskCache) -> BuildingSet:
    g = cache.load(arr, max_lattice)
    if g is None:
        g = closure(list(arr.generators), arr.ambient_dim, max_lattice)
    return g
