"""On-disk cache of exact Hecke traces keyed by (N, k, m).

File layout (little-endian)::

    b"HKTC" | u16 len | version string (utf-8) | u32 record count
    then per record: u64 N | u32 k | u64 m | u32 nbytes | value (signed, big-endian)

A file whose version string differs from :data:`trace.FORMULA_VERSION` is ignored.
"""

from __future__ import annotations

import logging
import os
import struct
import tempfile
from pathlib import Path

from .trace import FORMULA_VERSION

log = logging.getLogger(__name__)

MAGIC = b"HKTC"
FILENAME = "traces.bin"
ENV_VAR = "HECKEAVG_CACHE_DIR"
_RECORD = struct.Struct("<QIQI")


class TraceCache(dict):
    """A dict of (N, k, m) -> trace that loads from and saves to ``directory``."""

    def __init__(self, directory: str | os.PathLike, version: str = FORMULA_VERSION):
        super().__init__()
        self.directory = Path(directory)
        self.version = version
        self._loaded = 0
        self.load()

    @property
    def path(self) -> Path:
        return self.directory / FILENAME

    @property
    def dirty(self) -> bool:
        return len(self) != self._loaded

    def load(self) -> None:
        if not self.path.exists():
            return
        data = self.path.read_bytes()
        try:
            entries = _decode(data, self.version)
        except (ValueError, struct.error) as exc:
            log.warning("ignoring trace cache %s: %s", self.path, exc)
            return
        self.update(entries)
        self._loaded = len(self)

    def save(self) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        blob = _encode(self, self.version)
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".traces-")
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, self.path)
        self._loaded = len(self)


def _encode(entries: dict, version: str) -> bytes:
    v = version.encode()
    parts = [MAGIC, struct.pack("<H", len(v)), v, struct.pack("<I", len(entries))]
    for (N, k, m), value in sorted(entries.items()):
        raw = value.to_bytes((value.bit_length() + 8) // 8, "big", signed=True)
        parts.append(_RECORD.pack(N, k, m, len(raw)))
        parts.append(raw)
    return b"".join(parts)


def _decode(data: bytes, version: str) -> dict:
    if data[:4] != MAGIC:
        raise ValueError("bad magic")
    (vlen,) = struct.unpack_from("<H", data, 4)
    pos = 6
    found = data[pos : pos + vlen].decode()
    if found != version:
        raise ValueError(f"formula version {found!r} != {version!r}")
    pos += vlen
    (count,) = struct.unpack_from("<I", data, pos)
    pos += 4
    out = {}
    for _ in range(count):
        N, k, m, nbytes = _RECORD.unpack_from(data, pos)
        pos += _RECORD.size
        out[(N, k, m)] = int.from_bytes(data[pos : pos + nbytes], "big", signed=True)
        pos += nbytes
    if pos != len(data):
        raise ValueError("trailing bytes")
    return out


def default_cache_dir() -> Path | None:
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else None
