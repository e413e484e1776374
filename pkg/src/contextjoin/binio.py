"""Length-prefixed little-endian binary record helpers shared by the index files."""

from __future__ import annotations

import struct
from typing import BinaryIO

from .errors import IndexFormatError


def write_u32(fh: BinaryIO, value: int) -> None:
    fh.write(struct.pack("<I", value))


def read_u32(fh: BinaryIO) -> int:
    return struct.unpack("<I", _exactly(fh, 4))[0]


def write_u64(fh: BinaryIO, value: int) -> None:
    fh.write(struct.pack("<Q", value))


def read_u64(fh: BinaryIO) -> int:
    return struct.unpack("<Q", _exactly(fh, 8))[0]


def write_i64(fh: BinaryIO, value: int) -> None:
    fh.write(struct.pack("<q", value))


def read_i64(fh: BinaryIO) -> int:
    return struct.unpack("<q", _exactly(fh, 8))[0]


def write_str(fh: BinaryIO, value: str) -> None:
    raw = value.encode("utf-8")
    write_u32(fh, len(raw))
    fh.write(raw)


def read_str(fh: BinaryIO) -> str:
    n = read_u32(fh)
    return _exactly(fh, n).decode("utf-8")


def str_size(value: str) -> int:
    """On-disk byte size of a length-prefixed string."""
    return 4 + len(value.encode("utf-8"))


def check_magic(fh: BinaryIO, magic: bytes) -> None:
    got = fh.read(len(magic))
    if got != magic:
        raise IndexFormatError(f"bad header: expected {magic!r}, got {got!r}")


def _exactly(fh: BinaryIO, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise IndexFormatError("truncated index file")
    return data
