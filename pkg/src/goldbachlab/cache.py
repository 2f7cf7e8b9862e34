"""Binary prime-table cache: fixed little-endian header followed by the packed bitmap.

Layout (``<5sHQQQQ``, 39 bytes): magic ``GBLB1``, version, lo, hi,
bitmap length in bytes, FNV-1a 64-bit checksum of the bitmap.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .primes import PrimeTable

__all__ = ["CacheHeader", "CorruptCache", "fnv1a64", "save_cache", "load_cache", "MAGIC", "VERSION"]

MAGIC = b"GBLB1"
VERSION = 1
_HEADER = struct.Struct("<5sHQQQQ")
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK = (1 << 64) - 1


class CorruptCache(ValueError):
    pass


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK
    return h


@dataclass(frozen=True)
class CacheHeader:
    magic: bytes
    version: int
    lo: int
    hi: int
    bitmap_len: int
    checksum: int

    def pack(self) -> bytes:
        return _HEADER.pack(self.magic, self.version, self.lo, self.hi, self.bitmap_len, self.checksum)

    @classmethod
    def unpack(cls, raw: bytes) -> "CacheHeader":
        if len(raw) < _HEADER.size:
            raise CorruptCache("file shorter than the header")
        return cls(*_HEADER.unpack(raw[: _HEADER.size]))


def save_cache(table: PrimeTable, path: str | Path) -> CacheHeader:
    """Write atomically; rewriting the same table yields identical bytes."""
    data = table.bits.tobytes()
    hdr = CacheHeader(MAGIC, VERSION, table.lo, table.hi, len(data), fnv1a64(data))
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(hdr.pack())
        fh.write(data)
    os.replace(tmp, path)
    return hdr


def load_cache(path: str | Path) -> PrimeTable:
    raw = Path(path).read_bytes()
    hdr = CacheHeader.unpack(raw)
    if hdr.magic != MAGIC or hdr.version != VERSION:
        raise CorruptCache("bad magic or version")
    if hdr.hi <= hdr.lo or hdr.bitmap_len != PrimeTable.bitmap_len(hdr.lo, hdr.hi):
        raise CorruptCache("inconsistent range and bitmap length")
    data = raw[_HEADER.size :]
    if len(data) != hdr.bitmap_len:
        raise CorruptCache(f"expected {hdr.bitmap_len} bitmap bytes, found {len(data)}")
    if fnv1a64(data) != hdr.checksum:
        raise CorruptCache("checksum mismatch")
    return PrimeTable(hdr.lo, hdr.hi, np.frombuffer(data, dtype=np.uint8).copy())
