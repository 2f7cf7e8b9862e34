"""Bit-packed prime tables built by a segmented sieve of Eratosthenes.

Only odd integers are stored.  Bit ``i`` of the packed bitmap (little bit
order) describes the odd number ``first_odd + 2*i`` where ``first_odd`` is
the smallest odd integer ``>= lo``.  The even prime 2 is implied by the range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "PrimeTable",
    "SegmentRequired",
    "simple_sieve",
    "small_primes",
    "sieve_primes",
    "is_prime_scalar",
]

#: Largest span a single call to :func:`sieve_primes` will materialise.
DEFAULT_MAX_SPAN = 2_000_000_000

_SEGMENT_ODDS = 1 << 22


class SegmentRequired(ValueError):
    """Requested range exceeds the in-memory budget; sieve it in segments."""


def simple_sieve(limit: int) -> np.ndarray:
    """All primes ``<= limit`` as an int64 array."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    is_p[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if is_p[p]:
            is_p[p * p :: 2 * p] = False
    return np.flatnonzero(is_p).astype(np.int64)


@lru_cache(maxsize=8)
def _cached_primes(limit: int) -> np.ndarray:
    arr = simple_sieve(limit)
    arr.setflags(write=False)
    return arr


def small_primes(limit: int) -> np.ndarray:
    """Cached read-only prime list up to ``limit`` (rounded up to a power of two)."""
    size = 1 << max(10, int(limit).bit_length())
    arr = _cached_primes(size)
    return arr[: np.searchsorted(arr, limit, side="right")]


def is_prime_scalar(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all ``n < 3.3 * 10**24``."""
    if n < 2:
        return False
    bases = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in bases:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in bases:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeTable:
    """Primality of every integer in ``[lo, hi)``, packed one bit per odd number."""

    lo: int
    hi: int
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.bits.setflags(write=False)
        expected = self.bitmap_len(self.lo, self.hi)
        if self.bits.dtype != np.uint8 or self.bits.size != expected:
            raise ValueError(f"bitmap must be {expected} uint8 bytes, got {self.bits.size}")

    @staticmethod
    def bitmap_len(lo: int, hi: int) -> int:
        return -(-(hi - lo) // 16)

    @property
    def first_odd(self) -> int:
        return self.lo | 1

    @property
    def n_odd(self) -> int:
        return max(0, (self.hi - self.first_odd + 1) // 2)

    def __contains__(self, n: int) -> bool:
        return self.lo <= n < self.hi

    def is_prime(self, n):
        """Primality lookup; accepts a scalar or an integer array inside the range."""
        arr = np.asarray(n, dtype=np.int64)
        if arr.size and (arr.min() < self.lo or arr.max() >= self.hi):
            raise ValueError("query outside table range")
        out = np.zeros(arr.shape, dtype=bool)
        odd = (arr & 1) == 1
        idx = (arr[odd] - self.first_odd) // 2
        out[odd] = ((self.bits[idx >> 3] >> (idx & 7).astype(np.uint8)) & 1).astype(bool)
        out[arr == 2] = True
        return bool(out) if out.ndim == 0 else out

    def primes(self, a: int | None = None, b: int | None = None) -> np.ndarray:
        """Primes in ``[a, b)`` (defaults to the whole table), ascending."""
        a = self.lo if a is None else max(a, self.lo)
        b = self.hi if b is None else min(b, self.hi)
        if a >= b:
            return np.zeros(0, dtype=np.int64)
        i0 = max(0, (a - self.first_odd + 1) // 2)
        i1 = max(0, (b - self.first_odd + 1) // 2)
        chunk = np.unpackbits(self.bits, count=self.n_odd, bitorder="little")[i0:i1]
        out = self.first_odd + 2 * (i0 + np.flatnonzero(chunk).astype(np.int64))
        if a <= 2 < b:
            out = np.concatenate([np.array([2], dtype=np.int64), out])
        return out

    def count(self) -> int:
        total = int(np.unpackbits(self.bits, bitorder="little").sum())
        return total + (1 if self.lo <= 2 < self.hi else 0)

    def indicator(self, a: int, b: int) -> np.ndarray:
        """Dense boolean array ``out[n - a]`` for ``n`` in ``[a, b)``."""
        out = np.zeros(max(0, b - a), dtype=bool)
        p = self.primes(a, b)
        out[p - a] = True
        return out


def _sieve_segment(lo_odd: int, n_odd: int, base: np.ndarray) -> np.ndarray:
    """Boolean mask over odd numbers ``lo_odd + 2*i`` for ``i < n_odd``."""
    mask = np.ones(n_odd, dtype=bool)
    hi = lo_odd + 2 * n_odd
    for p in base[1:]:
        p = int(p)
        if p * p >= hi:
            break
        start = max(p * p, -(-lo_odd // p) * p)
        if start % 2 == 0:
            start += p
        if start >= hi:
            continue
        mask[(start - lo_odd) // 2 :: p] = False
    if lo_odd == 1:
        mask[0] = False
    return mask


def sieve_primes(lo: int, hi: int, max_span: int = DEFAULT_MAX_SPAN) -> PrimeTable:
    """Exact prime table for ``[lo, hi)``.

    Raises :class:`SegmentRequired` when ``hi - lo`` exceeds ``max_span``; the
    caller is expected to iterate over sub-ranges in that case.
    """
    if not (2 <= lo < hi <= 2**63):
        raise ValueError("need 2 <= lo < hi <= 2**63")
    if hi - lo > max_span:
        raise SegmentRequired(f"span {hi - lo} exceeds budget {max_span}")
    base = simple_sieve(math.isqrt(hi - 1) + 1)
    first_odd = lo | 1
    n_odd = max(0, (hi - first_odd + 1) // 2)
    packed = []
    done = 0
    while done < n_odd:
        # segments hold a multiple of 8 odds so packed bytes concatenate cleanly
        step = min(_SEGMENT_ODDS, n_odd - done)
        packed.append(np.packbits(_sieve_segment(first_odd + 2 * done, step, base), bitorder="little"))
        done += step
    bits = np.zeros(PrimeTable.bitmap_len(lo, hi), dtype=np.uint8)
    if packed:
        joined = np.concatenate(packed)
        bits[: joined.size] = joined
    return PrimeTable(lo, hi, bits)
