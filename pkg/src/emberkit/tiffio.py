"""Single-band 32-bit float TIFF reader/writer.

The on-disk product format for temperature rasters and nadir-plot products:
one band, IEEE float32, uncompressed, no georeferencing tags (georeferencing
lives in plain-text sidecars). The writer is deliberately hand-rolled so
output bytes are stable across library versions; the reader also accepts
equivalent single-band float TIFFs from other writers (e.g. Pillow mode "F"),
including multi-strip and big-endian layouts.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import IoFailure, UnsupportedTiffLayout
from .raster import TemperatureRaster

_II = b"II"
_MM = b"MM"

_SHORT = 3
_LONG = 4

TAG_WIDTH = 256
TAG_HEIGHT = 257
TAG_BITS_PER_SAMPLE = 258
TAG_COMPRESSION = 259
TAG_PHOTOMETRIC = 262
TAG_STRIP_OFFSETS = 273
TAG_SAMPLES_PER_PIXEL = 277
TAG_ROWS_PER_STRIP = 278
TAG_STRIP_BYTE_COUNTS = 279
TAG_PLANAR_CONFIG = 284
TAG_TILE_OFFSETS = 324
TAG_SAMPLE_FORMAT = 339

_FLOAT_SAMPLE_FORMAT = 3


def array_tiff_bytes(values: np.ndarray) -> bytes:
    """Serialize a 2-D float32 array as a single-strip little-endian TIFF."""
    arr = np.asarray(values, dtype="<f4")
    if arr.ndim != 2:
        raise ValueError(f"expected 2-D array, got shape {arr.shape}")
    height, width = arr.shape
    data = arr.tobytes()

    entries = [
        (TAG_WIDTH, _LONG, 1, width),
        (TAG_HEIGHT, _LONG, 1, height),
        (TAG_BITS_PER_SAMPLE, _SHORT, 1, 32),
        (TAG_COMPRESSION, _SHORT, 1, 1),
        (TAG_PHOTOMETRIC, _SHORT, 1, 1),
        (TAG_STRIP_OFFSETS, _LONG, 1, 0),  # patched below
        (TAG_SAMPLES_PER_PIXEL, _SHORT, 1, 1),
        (TAG_ROWS_PER_STRIP, _LONG, 1, height),
        (TAG_STRIP_BYTE_COUNTS, _LONG, 1, len(data)),
        (TAG_SAMPLE_FORMAT, _SHORT, 1, _FLOAT_SAMPLE_FORMAT),
    ]
    data_offset = 8 + 2 + len(entries) * 12 + 4
    ifd = struct.pack("<H", len(entries))
    for tag, typ, count, value in entries:
        if tag == TAG_STRIP_OFFSETS:
            value = data_offset
        ifd += struct.pack("<HHII", tag, typ, count, value)
    ifd += struct.pack("<I", 0)
    return _II + struct.pack("<HI", 42, 8) + ifd + data


def write_array_tiff(path: str | Path, values: np.ndarray) -> None:
    try:
        Path(path).write_bytes(array_tiff_bytes(values))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def _tag_values(buf: bytes, endian: str, typ: int, count: int, value_field: bytes) -> list[int]:
    size = 2 if typ == _SHORT else 4
    fmt = "H" if typ == _SHORT else "I"
    total = size * count
    if total <= 4:
        raw = value_field[:total]
    else:
        (offset,) = struct.unpack(endian + "I", value_field)
        raw = buf[offset : offset + total]
    return list(struct.unpack(endian + fmt * count, raw))


def read_array_tiff(path: str | Path) -> np.ndarray:
    """Read a single-band float32 TIFF into a 2-D array.

    Raises UnsupportedTiffLayout for anything that is not one band of
    uncompressed IEEE float32 (multi-band, integer, compressed, tiled).
    """
    try:
        buf = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    if len(buf) < 8 or buf[:2] not in (_II, _MM):
        raise UnsupportedTiffLayout("not a TIFF container")
    endian = "<" if buf[:2] == _II else ">"
    magic, ifd_offset = struct.unpack_from(endian + "HI", buf, 2)
    if magic != 42:
        raise UnsupportedTiffLayout(f"bad TIFF magic {magic}")

    tags: dict[int, list[int]] = {}
    if ifd_offset + 2 > len(buf):
        raise UnsupportedTiffLayout("truncated IFD")
    (count,) = struct.unpack_from(endian + "H", buf, ifd_offset)
    for i in range(count):
        base = ifd_offset + 2 + i * 12
        tag, typ, n = struct.unpack_from(endian + "HHI", buf, base)
        if typ in (_SHORT, _LONG):
            tags[tag] = _tag_values(buf, endian, typ, n, buf[base + 8 : base + 12])

    def one(tag: int, default: int | None = None) -> int:
        if tag not in tags:
            if default is None:
                raise UnsupportedTiffLayout(f"required tag {tag} missing")
            return default
        return tags[tag][0]

    if TAG_TILE_OFFSETS in tags:
        raise UnsupportedTiffLayout("tiled TIFFs not supported")
    samples = one(TAG_SAMPLES_PER_PIXEL, 1)
    if samples != 1:
        raise UnsupportedTiffLayout(f"expected 1 band, found {samples}")
    bits = one(TAG_BITS_PER_SAMPLE, 1)
    if bits != 32:
        raise UnsupportedTiffLayout(f"expected 32 bits/sample, found {bits}")
    if one(TAG_SAMPLE_FORMAT, 1) != _FLOAT_SAMPLE_FORMAT:
        raise UnsupportedTiffLayout("sample format is not IEEE float")
    if one(TAG_COMPRESSION, 1) != 1:
        raise UnsupportedTiffLayout("compressed TIFFs not supported")

    width = one(TAG_WIDTH)
    height = one(TAG_HEIGHT)
    offsets = tags.get(TAG_STRIP_OFFSETS)
    counts = tags.get(TAG_STRIP_BYTE_COUNTS)
    if not offsets or not counts or len(offsets) != len(counts):
        raise UnsupportedTiffLayout("missing or inconsistent strip layout")
    data = b"".join(buf[o : o + c] for o, c in zip(offsets, counts))
    if len(data) != 4 * width * height:
        raise UnsupportedTiffLayout(
            f"strip data holds {len(data)} bytes, expected {4 * width * height}"
        )
    return np.frombuffer(data, dtype=endian + "f4").reshape(height, width).astype("=f4")


def write_tiff(raster: TemperatureRaster, path: str | Path) -> None:
    """Persist a temperature raster; write then read is bit-exact."""
    write_array_tiff(path, raster.values)


def read_tiff(path: str | Path) -> TemperatureRaster:
    """Load a temperature raster written by write_tiff (or equivalent)."""
    return TemperatureRaster(read_array_tiff(path))
