"""Minimal MP4 metadata access: movie-header creation time.

Video pairing only needs each file's start timestamp, which lives in the
``mvhd`` box as seconds since 1904-01-01 UTC. A matching fixture writer emits
the smallest container our parser consumes (ftyp + moov/mvhd + empty mdat);
fixture videos are metadata carriers, not playable footage.
"""

from __future__ import annotations

import struct
from datetime import datetime, timedelta, timezone
from typing import Iterator

_EPOCH_1904 = datetime(1904, 1, 1, tzinfo=timezone.utc)


def _iter_boxes(data: bytes, start: int, end: int) -> Iterator[tuple[bytes, int, int]]:
    """Yield (fourcc, body_start, body_end) for each box in [start, end)."""
    pos = start
    while pos + 8 <= end:
        size, fourcc = struct.unpack_from(">I4s", data, pos)
        header = 8
        if size == 1:
            if pos + 16 > end:
                return
            (size,) = struct.unpack_from(">Q", data, pos + 8)
            header = 16
        elif size == 0:
            size = end - pos
        if size < header or pos + size > end:
            return
        yield fourcc, pos + header, pos + size
        pos += size


def is_mp4(data: bytes) -> bool:
    return len(data) >= 12 and data[4:8] == b"ftyp"


def read_creation_time(data: bytes) -> datetime:
    """Extract mvhd creation time; raises ValueError when absent or malformed."""
    if not is_mp4(data):
        raise ValueError("not an MP4 container")
    for fourcc, body_start, body_end in _iter_boxes(data, 0, len(data)):
        if fourcc != b"moov":
            continue
        for inner, inner_start, _ in _iter_boxes(data, body_start, body_end):
            if inner != b"mvhd":
                continue
            version = data[inner_start]
            if version == 1:
                (created,) = struct.unpack_from(">Q", data, inner_start + 4)
            else:
                (created,) = struct.unpack_from(">I", data, inner_start + 4)
            return _EPOCH_1904 + timedelta(seconds=created)
    raise ValueError("no moov/mvhd box found")


def write_minimal_mp4(creation_time: datetime) -> bytes:
    """Serialize the smallest ftyp+moov(mvhd)+mdat container carrying a timestamp."""
    seconds = int((creation_time.astimezone(timezone.utc) - _EPOCH_1904).total_seconds())
    ftyp = struct.pack(">I4s", 24, b"ftyp") + b"isom" + struct.pack(">I", 512) + b"isomiso2"
    # mvhd v0: creation, modification, timescale, duration, rate, volume,
    # reserved, matrix, predefines, next track id
    mvhd_body = struct.pack(
        ">B3xIIII", 0, seconds, seconds, 1000, 0
    ) + struct.pack(">Ihh8x", 0x00010000, 0x0100, 0)
    mvhd_body += struct.pack(">9I", 0x00010000, 0, 0, 0, 0x00010000, 0, 0, 0, 0x40000000)
    mvhd_body += struct.pack(">6I", 0, 0, 0, 0, 0, 0) + struct.pack(">I", 2)
    mvhd = struct.pack(">I4s", 8 + len(mvhd_body), b"mvhd") + mvhd_body
    moov = struct.pack(">I4s", 8 + len(mvhd), b"moov") + mvhd
    mdat = struct.pack(">I4s", 8, b"mdat")
    return ftyp + moov + mdat
