"""Low-level JPEG container walking: segment iteration and splicing.

Shared by the radiometric codec (APP7 payload) and the EXIF reader/writer
(APP1). Only marker structure is interpreted here; entropy-coded image data
is passed through untouched.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterator

from .errors import NotAJpeg

SOI = b"\xff\xd8"
EOI_MARKER = 0xD9
SOS_MARKER = 0xDA

# Markers with no length field (standalone).
_STANDALONE = {0x01, *range(0xD0, 0xD8)}


@dataclass
class Segment:
    marker: int          # second marker byte, e.g. 0xE1 for APP1
    offset: int          # file offset of the 0xFF marker byte
    payload: bytes       # segment body, excluding marker and length field


def iter_segments(data: bytes) -> Iterator[Segment]:
    """Yield marker segments from SOI up to (and excluding) the SOS scan data.

    Raises NotAJpeg when the container does not start with SOI or the marker
    stream is malformed before the scan starts.
    """
    if len(data) < 4 or data[:2] != SOI:
        raise NotAJpeg("missing SOI marker")
    pos = 2
    while pos < len(data):
        if data[pos] != 0xFF:
            raise NotAJpeg(f"expected marker at offset {pos}")
        # fill bytes before a marker are legal
        while pos < len(data) and data[pos] == 0xFF:
            pos += 1
        if pos >= len(data):
            raise NotAJpeg("truncated marker stream")
        marker = data[pos]
        start = pos - 1
        pos += 1
        if marker == SOS_MARKER or marker == EOI_MARKER:
            return
        if marker in _STANDALONE:
            yield Segment(marker, start, b"")
            continue
        if pos + 2 > len(data):
            raise NotAJpeg("truncated segment length")
        (length,) = struct.unpack(">H", data[pos : pos + 2])
        if length < 2 or pos + length > len(data):
            raise NotAJpeg(f"bad segment length {length} at offset {pos}")
        yield Segment(marker, start, data[pos + 2 : pos + length])
        pos += length


def build_segment(marker: int, payload: bytes) -> bytes:
    """Serialize one marker segment (length field covers itself + payload)."""
    if len(payload) + 2 > 0xFFFF:
        raise ValueError(f"segment payload too large: {len(payload)} bytes")
    return bytes([0xFF, marker]) + struct.pack(">H", len(payload) + 2) + payload


def insert_after_soi(data: bytes, segments: bytes) -> bytes:
    """Return a copy of the JPEG with raw segment bytes spliced in after SOI."""
    if data[:2] != SOI:
        raise NotAJpeg("missing SOI marker")
    return SOI + segments + data[2:]


# SOF0..SOF15 minus DHT/JPG/DAC markers, which share the 0xC0 block.
_SOF_MARKERS = set(range(0xC0, 0xD0)) - {0xC4, 0xC8, 0xCC}


def jpeg_dimensions(data: bytes) -> tuple[int, int] | None:
    """Return (width, height) from the frame header, or None if absent."""
    for seg in iter_segments(data):
        if seg.marker in _SOF_MARKERS and len(seg.payload) >= 5:
            height, width = struct.unpack(">HH", seg.payload[1:5])
            return width, height
    return None


def remove_segments(data: bytes, should_remove) -> bytes:
    """Return a copy of the JPEG with every segment matching the predicate dropped.

    ``should_remove(segment)`` is consulted for each pre-scan segment; the scan
    data and everything after it is copied verbatim.
    """
    out = bytearray(SOI)
    last_end = 2
    for seg in iter_segments(data):
        seg_len = 2 if seg.payload == b"" and seg.marker in _STANDALONE else 4 + len(seg.payload)
        out += data[last_end : seg.offset]
        if not should_remove(seg):
            out += data[seg.offset : seg.offset + seg_len]
        last_end = seg.offset + seg_len
    out += data[last_end:]
    return bytes(out)
