"""Segmented odd-only prime sieve and the prime counting functions.

A :class:`PrimeTable` stores one bit per odd integer. Bit ``i`` of the
global bit stream stands for ``n = 2*i + 1``; the prime 2 is implicit.
Bits are packed little-endian within each byte and grouped in segments of
``segment_size`` bytes, which is also the unit of the on-disk cache.

Cache file layout (all integers little-endian)::

    b"MFSV1"
    limit           uint64
    segment_size    uint64   bytes per full segment
    segment_count   uint64
    crc32           uint32   one per segment, in order
    payload         segment bytes, concatenated; the last one may be short
"""

from __future__ import annotations

import logging
import math
import os
import struct
import zlib
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from ._arith import prime_divisors, totient
from ._quadrature import integrate
from .errors import CacheCorruptError, TableRangeError

log = logging.getLogger(__name__)

MAX_LIMIT = 2**40
DEFAULT_SEGMENT_BYTES = 256 * 1024
CACHE_MAGIC = b"MFSV1"
CACHE_ENV = "MERTENS_CACHE_DIR"
_HEADER = struct.Struct("<5sQQQ")


@dataclass(frozen=True)
class APTarget:
    """A residue class ``a mod q`` with ``1 <= a <= q`` and ``gcd(q, a) = 1``."""

    q: int
    a: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"modulus must be positive, got q={self.q}")
        if not 1 <= self.a <= self.q:
            raise ValueError(f"residue must satisfy 1 <= a <= q, got a={self.a}, q={self.q}")
        if math.gcd(self.q, self.a) != 1:
            raise ValueError(f"gcd(q, a) = {math.gcd(self.q, self.a)} != 1 for q={self.q}, a={self.a}")

    @classmethod
    def normalized(cls, q: int, a: int) -> "APTarget":
        """Build a target from any representative of the class."""
        r = a % q
        return cls(q, r if r else q)

    @property
    def phi(self) -> int:
        return totient(self.q)


@dataclass(frozen=True)
class CountingSnapshot:
    t: float
    pi: int
    pi_ap: int
    li: float
    error: float


class PrimeTable:
    """Immutable bit-packed store of the primes up to ``limit``."""

    def __init__(self, limit: int, segment_size: int, segments: list[np.ndarray]):
        self.limit = int(limit)
        self.segment_size = int(segment_size)
        self.segments = segments
        for seg in segments:
            seg.flags.writeable = False

    def __repr__(self):
        return (f"PrimeTable(limit={self.limit}, segment_size={self.segment_size}, "
                f"segments={len(self.segments)})")

    @property
    def nbits(self) -> int:
        return (self.limit + 1) // 2

    def is_prime(self, n: int) -> bool:
        n = int(n)
        if n > self.limit:
            raise TableRangeError(f"{n} exceeds table limit {self.limit}")
        if n == 2:
            return True
        if n < 2 or n % 2 == 0:
            return False
        bit = (n - 1) // 2
        byte = bit >> 3
        seg, off = divmod(byte, self.segment_size)
        return bool((self.segments[seg][off] >> (bit & 7)) & 1)

    @cached_property
    def primes(self) -> np.ndarray:
        """All primes up to ``limit`` as a sorted int64 array."""
        parts = [np.array([2] if self.limit >= 2 else [], dtype=np.int64)]
        bits_per_seg = 8 * self.segment_size
        for k, seg in enumerate(self.segments):
            bits = np.unpackbits(seg, bitorder="little")
            idx = np.flatnonzero(bits).astype(np.int64)
            parts.append(2 * (idx + k * bits_per_seg) + 1)
        out = np.concatenate(parts)
        out.flags.writeable = False
        return out

    def primes_upto(self, t: float) -> np.ndarray:
        n = self._check(t)
        return self.primes[: int(np.searchsorted(self.primes, n, side="right"))]

    def pi(self, t: float) -> int:
        n = self._check(t)
        return int(np.searchsorted(self.primes, n, side="right"))

    def checksums(self) -> list[int]:
        return [zlib.crc32(seg.tobytes()) for seg in self.segments]

    def _check(self, t: float) -> int:
        if t < 2:
            raise TableRangeError(f"counting functions need t >= 2, got t={t:g}")
        if t > self.limit:
            raise TableRangeError(f"t={t:g} exceeds table limit {self.limit}")
        return math.floor(t)


def _base_primes(n: int) -> np.ndarray:
    """Primes up to ``n`` via a plain (non-segmented) sieve."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _sieve_segment(first_bit: int, nbits: int, odd_primes: np.ndarray) -> np.ndarray:
    seg = np.ones(nbits, dtype=bool)
    lo = 2 * first_bit + 1
    hi = 2 * (first_bit + nbits - 1) + 1
    for p in odd_primes:
        p = int(p)
        if p * p > hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        if start % 2 == 0:
            start += p
        seg[(start - 1) // 2 - first_bit :: p] = False
    if first_bit == 0:
        seg[0] = False  # n = 1
    return seg


def sieve(limit: int, segment_size: int = DEFAULT_SEGMENT_BYTES) -> PrimeTable:
    """Sieve the primes up to ``limit`` without touching any cache."""
    if not 2 <= limit <= MAX_LIMIT:
        raise TableRangeError(f"limit must lie in [2, 2**40], got {limit}")
    if segment_size < 1:
        raise ValueError("segment_size must be positive")
    odd_primes = _base_primes(math.isqrt(limit))[1:]
    total_bits = (limit + 1) // 2
    bits_per_seg = 8 * segment_size
    segments = []
    for first in range(0, total_bits, bits_per_seg):
        nbits = min(bits_per_seg, total_bits - first)
        seg = _sieve_segment(first, nbits, odd_primes)
        segments.append(np.packbits(seg, bitorder="little"))
    return PrimeTable(limit, segment_size, segments)


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "apmertens"


def cache_path(cache_dir: Path | str, limit: int, segment_size: int) -> Path:
    return Path(cache_dir) / f"sieve-{limit}-{segment_size}.mfsv"


def save_table(table: PrimeTable, path: Path | str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_HEADER.pack(CACHE_MAGIC, table.limit, table.segment_size, len(table.segments)))
        fh.write(struct.pack(f"<{len(table.segments)}I", *table.checksums()))
        for seg in table.segments:
            fh.write(seg.tobytes())
    os.replace(tmp, path)


def load_table(path: Path | str) -> PrimeTable:
    """Read a cache file, validating magic, sizes and every segment CRC."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise CacheCorruptError(f"{path}: truncated header; rebuild required")
    magic, limit, segment_size, count = _HEADER.unpack_from(data)
    if magic != CACHE_MAGIC:
        raise CacheCorruptError(f"{path}: bad magic {magic!r}; rebuild required")
    if not 2 <= limit <= MAX_LIMIT or segment_size < 1:
        raise CacheCorruptError(f"{path}: implausible header; rebuild required")
    total_bytes = ((limit + 1) // 2 + 7) // 8
    expected_count = -(-total_bytes // segment_size)
    if count != expected_count:
        raise CacheCorruptError(f"{path}: segment count {count} != {expected_count}; rebuild required")
    off = _HEADER.size
    crcs = struct.unpack_from(f"<{count}I", data, off)
    off += 4 * count
    if len(data) - off != total_bytes:
        raise CacheCorruptError(f"{path}: payload size mismatch; rebuild required")
    segments = []
    for k, crc in enumerate(crcs):
        size = min(segment_size, total_bytes - k * segment_size)
        chunk = data[off : off + size]
        off += size
        if zlib.crc32(chunk) != crc:
            raise CacheCorruptError(f"{path}: CRC mismatch in segment {k}; rebuild required")
        segments.append(np.frombuffer(chunk, dtype=np.uint8).copy())
    return PrimeTable(limit, segment_size, segments)


def build_table(
    limit: int,
    segment_size: int = DEFAULT_SEGMENT_BYTES,
    cache_dir: Path | str | None = None,
    use_cache: bool = False,
) -> PrimeTable:
    """Return the prime table up to ``limit``.

    With ``use_cache`` (or an explicit ``cache_dir``) a valid cache file is
    loaded instead of sieving, and a freshly sieved table is written back.
    A corrupt cache file raises :class:`CacheCorruptError`.
    """
    if not 2 <= limit <= MAX_LIMIT:
        raise TableRangeError(f"limit must lie in [2, 2**40], got {limit}")
    if cache_dir is None and not use_cache:
        return sieve(limit, segment_size)
    path = cache_path(cache_dir if cache_dir is not None else default_cache_dir(), limit, segment_size)
    if path.exists():
        log.debug("loading sieve cache %s", path)
        return load_table(path)
    table = sieve(limit, segment_size)
    try:
        save_table(table, path)
    except OSError as exc:
        log.warning("could not write sieve cache %s: %s", path, exc)
    return table


_SHARED: dict[int, PrimeTable] = {}


def shared_table(limit: int) -> PrimeTable:
    """Process-wide table covering at least ``limit`` (reused across calls)."""
    for lim, table in _SHARED.items():
        if lim >= limit:
            return table
    table = sieve(max(limit, 10**4))
    _SHARED[table.limit] = table
    return table


def register_table(table: PrimeTable) -> None:
    """Make ``table`` available to :func:`shared_table`."""
    _SHARED[table.limit] = table


def _as_target(ap: APTarget | tuple[int, int]) -> APTarget:
    return ap if isinstance(ap, APTarget) else APTarget(*ap)


def pi_ap(table: PrimeTable, t: float, ap: APTarget | tuple[int, int]) -> int:
    """Number of primes ``p <= t`` with ``p = a mod q``."""
    ap = _as_target(ap)
    ps = table.primes_upto(t)
    if ap.q == 1:
        return len(ps)
    return int(np.count_nonzero(ps % ap.q == ap.a % ap.q))


def li(t: float) -> float:
    """Logarithmic integral from 2 to ``t``."""
    if t < 2:
        raise ValueError(f"li(t) needs t >= 2, got {t}")
    if t == 2:
        return 0.0
    # u = exp(v) turns 1/log u into the smooth exp(v)/v on [log 2, log t].
    lo, hi = math.log(2.0), math.log(t)
    estimate = t / hi
    value, _ = integrate(lambda v: np.exp(v) / v, lo, hi,
                         abs_tol=1e-12 * max(1.0, estimate), rel_tol=1e-13)
    return value


def error_term(table: PrimeTable, t: float, ap: APTarget | tuple[int, int]) -> float:
    """``pi(t; q, a) - li(t) / phi(q)``."""
    ap = _as_target(ap)
    return pi_ap(table, t, ap) - li(t) / ap.phi


def omega_q(table: PrimeTable, t: float, q: int) -> int:
    """Number of primes ``p <= t`` dividing ``q``."""
    table._check(t)
    return sum(1 for p in prime_divisors(q) if p <= t)


def snapshot(table: PrimeTable, t: float, ap: APTarget | tuple[int, int]) -> CountingSnapshot:
    ap = _as_target(ap)
    count = pi_ap(table, t, ap)
    li_t = li(t)
    return CountingSnapshot(t=t, pi=table.pi(t), pi_ap=count, li=li_t, error=count - li_t / ap.phi)
