"""
Binary prime-table cache.

Layout (little-endian): magic ``b"NTOS"``, uint32 format version, uint64
limit, uint64 count, then ``count`` uint64 primes in ascending order.
"""
from __future__ import annotations

import logging
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .arith import PrimeTable
from .errors import CacheError
from .errors import PreconditionError

logger = logging.getLogger(__name__)

MAGIC = b'NTOS'
FORMAT_VERSION = 1
_HEADER = struct.Struct('<4sIQQ')
_BODY_DTYPE = np.dtype('<u8')


def table_filename(limit: int) -> str:
    return f"primes-{limit}.ntos"


def encode_table(table: PrimeTable) -> bytes:
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, table.limit, len(table))
    return header + table.primes.astype(_BODY_DTYPE).tobytes()


def decode_table(data: bytes) -> PrimeTable:
    """
    Parse and validate a cache payload.

    Raises:
        CacheError: If the magic, version, length or prime order is wrong
    """
    if len(data) < _HEADER.size:
        raise CacheError(f"Cache payload of {len(data)} bytes is shorter than its header")
    magic, version, limit, count = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CacheError(f"Bad cache magic {magic!r}")
    if version != FORMAT_VERSION:
        raise CacheError(f"Unsupported cache format version {version}")
    body = data[_HEADER.size:]
    if len(body) != count * _BODY_DTYPE.itemsize:
        raise CacheError(
            f"Cache declares {count} primes but carries {len(body)} body bytes")
    primes = np.frombuffer(body, dtype=_BODY_DTYPE).astype(np.int64)
    table = PrimeTable(int(limit), primes)
    try:
        table.validate()
    except PreconditionError as e:
        raise CacheError(f"Invalid cached prime table: {e}") from e
    return table


def save_table(table: PrimeTable, path: str | os.PathLike) -> Path:
    """
    Write the table to ``path`` atomically (temp file in the same directory,
    then rename), so an interrupted run never leaves a partial cache file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix='.primes-', suffix='.tmp')
    try:
        with os.fdopen(fd, 'wb') as f:
            f.write(encode_table(table))
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    logger.info('Cached %d primes up to %d at %s', len(table), table.limit, path)
    return path


def _limit_from_name(path: Path) -> int | None:
    try:
        return int(path.stem.split('-', 1)[1])
    except (IndexError, ValueError):
        return None


def load_table(path: str | os.PathLike) -> PrimeTable:
    """
    Read a cache file written by ``save_table``.

    Raises:
        CacheError: If the payload is damaged or its limit differs from the
            one in the file name
    """
    path = Path(path)
    with open(path, 'rb') as f:
        table = decode_table(f.read())
    named = _limit_from_name(path)
    if named is not None and named != table.limit:
        raise CacheError(f"{path.name} holds a table with limit {table.limit}")
    return table


def find_cached(cache_dir: str | os.PathLike, limit: int) -> Path | None:
    """The cache file with the smallest limit >= ``limit``, if any."""
    cache_dir = Path(cache_dir)
    if not cache_dir.is_dir():
        return None
    best = None
    for candidate in cache_dir.glob('primes-*.ntos'):
        cached_limit = _limit_from_name(candidate)
        if cached_limit is None:
            continue
        if cached_limit >= limit and (best is None or cached_limit < best[0]):
            best = (cached_limit, candidate)
    return best[1] if best else None
