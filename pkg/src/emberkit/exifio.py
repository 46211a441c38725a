"""Minimal EXIF reader/writer for JPEG capture metadata.

Handles the fields the pipeline needs (DateTimeOriginal, SubSecTimeOriginal,
Model) plus an opaque passthrough of any other ASCII tags found in IFD0 or the
Exif IFD. The writer emits little-endian TIFF structures with tags in
ascending order; output is byte-deterministic for a given metadata value.
"""

from __future__ import annotations

import struct
from datetime import datetime, timezone
from pathlib import Path

from . import jpegio
from .errors import IoFailure, NoMetadataInSource
from .raster import CaptureMetadata, Modality

EXIF_HEADER = b"Exif\x00\x00"
APP1 = 0xE1

_ASCII = 2
_LONG = 4

TAG_EXIF_IFD = 0x8769
TAG_MODEL = 0x0110
TAG_DATETIME = 0x0132
TAG_DATETIME_ORIGINAL = 0x9003
TAG_SUBSEC_ORIGINAL = 0x9291

# Named ASCII tags; anything else ASCII is carried as "tag_<hex>".
_IFD0_TAGS = {
    0x010E: "image_description",
    0x010F: "make",
    0x0110: "model",
    0x0131: "software",
    0x0132: "datetime",
}
_EXIF_TAGS = {
    0x9003: "datetime_original",
    0x9004: "datetime_digitized",
    0x9290: "subsec_time",
    0x9291: "subsec_time_original",
    0x9292: "subsec_time_digitized",
    0xA434: "lens_model",
}
_IFD0_NAMES = {v: k for k, v in _IFD0_TAGS.items()}
_EXIF_NAMES = {v: k for k, v in _EXIF_TAGS.items()}

_TIMESTAMP_FMT = "%Y:%m:%d %H:%M:%S"


def _read_ascii(tiff: bytes, endian: str, count: int, value_field: bytes) -> str:
    if count <= 4:
        raw = value_field[:count]
    else:
        (offset,) = struct.unpack(endian + "I", value_field)
        raw = tiff[offset : offset + count]
    return raw.split(b"\x00", 1)[0].decode("ascii", errors="replace")


def _parse_ifd(tiff: bytes, endian: str, offset: int) -> dict[int, str]:
    """Return {tag: string} for all ASCII entries of one IFD."""
    entries: dict[int, str] = {}
    if offset + 2 > len(tiff):
        return entries
    (count,) = struct.unpack_from(endian + "H", tiff, offset)
    for i in range(count):
        base = offset + 2 + i * 12
        if base + 12 > len(tiff):
            break
        tag, typ, n = struct.unpack_from(endian + "HHI", tiff, base)
        value_field = tiff[base + 8 : base + 12]
        if typ == _ASCII:
            entries[tag] = _read_ascii(tiff, endian, n, value_field)
        elif typ == _LONG and tag == TAG_EXIF_IFD:
            (ptr,) = struct.unpack(endian + "I", value_field)
            entries[tag] = str(ptr)
    return entries


def parse_exif_tags(jpeg_bytes: bytes) -> dict[str, str] | None:
    """Extract {name: value} ASCII tags from the APP1 Exif segment, or None."""
    for seg in jpegio.iter_segments(jpeg_bytes):
        if seg.marker == APP1 and seg.payload.startswith(EXIF_HEADER):
            tiff = seg.payload[len(EXIF_HEADER):]
            break
    else:
        return None
    if len(tiff) < 8:
        return None
    order = tiff[:2]
    if order == b"II":
        endian = "<"
    elif order == b"MM":
        endian = ">"
    else:
        return None
    (ifd0_offset,) = struct.unpack_from(endian + "I", tiff, 4)

    tags: dict[str, str] = {}
    ifd0 = _parse_ifd(tiff, endian, ifd0_offset)
    for tag, value in ifd0.items():
        if tag == TAG_EXIF_IFD:
            continue
        tags[_IFD0_TAGS.get(tag, f"tag_{tag:04x}")] = value
    if TAG_EXIF_IFD in ifd0:
        exif_ifd = _parse_ifd(tiff, endian, int(ifd0[TAG_EXIF_IFD]))
        for tag, value in exif_ifd.items():
            tags[_EXIF_TAGS.get(tag, f"tag_{tag:04x}")] = value
    return tags


def metadata_from_tags(
    tags: dict[str, str],
    width: int = 0,
    height: int = 0,
    modality: Modality = Modality.RGB,
) -> CaptureMetadata:
    """Build CaptureMetadata from parsed tags; raises ValueError when no timestamp."""
    stamp = tags.get("datetime_original") or tags.get("datetime")
    if not stamp:
        raise ValueError("no DateTimeOriginal/DateTime tag")
    dt = datetime.strptime(stamp.strip(), _TIMESTAMP_FMT).replace(tzinfo=timezone.utc)
    subsec = tags.get("subsec_time_original", "").strip()
    if subsec.isdigit():
        dt = dt.replace(microsecond=round(int(subsec) / 10 ** len(subsec) * 1e6))
    consumed = {"datetime_original", "datetime", "subsec_time_original", "model"}
    extra = {k: v for k, v in tags.items() if k not in consumed}
    return CaptureMetadata(
        timestamp=dt,
        camera_model=tags.get("model", ""),
        image_width=width,
        image_height=height,
        modality=modality,
        extra=extra,
    )


def _encode_ifd(entries: list[tuple[int, int, bytes]], ifd_offset: int, next_ifd: int = 0) -> bytes:
    """Serialize one little-endian IFD.

    entries: (tag, type, raw value bytes) sorted by tag. Values longer than
    4 bytes go to a data area immediately after the IFD table.
    """
    entries = sorted(entries)
    data_offset = ifd_offset + 2 + len(entries) * 12 + 4
    table = struct.pack("<H", len(entries))
    data = b""
    for tag, typ, raw in entries:
        count = len(raw) if typ == _ASCII else len(raw) // 4
        if len(raw) <= 4:
            value_field = raw.ljust(4, b"\x00")
        else:
            value_field = struct.pack("<I", data_offset + len(data))
            data += raw
        table += struct.pack("<HHI", tag, typ, count) + value_field
    table += struct.pack("<I", next_ifd)
    return table + data


def build_exif_app1(meta: CaptureMetadata) -> bytes:
    """Serialize CaptureMetadata as a complete APP1 Exif segment payload."""
    def ascii_bytes(s: str) -> bytes:
        return s.encode("ascii", errors="replace") + b"\x00"

    ifd0: list[tuple[int, int, bytes]] = []
    if meta.camera_model:
        ifd0.append((TAG_MODEL, _ASCII, ascii_bytes(meta.camera_model)))
    exif: list[tuple[int, int, bytes]] = [
        (TAG_DATETIME_ORIGINAL, _ASCII, ascii_bytes(meta.timestamp.strftime(_TIMESTAMP_FMT))),
        (TAG_SUBSEC_ORIGINAL, _ASCII, ascii_bytes(f"{meta.timestamp.microsecond // 1000:03d}")),
    ]
    for key, value in sorted(meta.extra.items()):
        raw = ascii_bytes(value)
        if key in _IFD0_NAMES:
            ifd0.append((_IFD0_NAMES[key], _ASCII, raw))
        elif key in _EXIF_NAMES:
            exif.append((_EXIF_NAMES[key], _ASCII, raw))
        elif key.startswith("tag_"):
            try:
                exif.append((int(key[4:], 16), _ASCII, raw))
            except ValueError:
                pass

    # IFD0 carries the Exif IFD pointer; its value depends on IFD0's encoded
    # size, which is stable once the entry list is fixed.
    ifd0_size_placeholder = _encode_ifd(
        ifd0 + [(TAG_EXIF_IFD, _LONG, struct.pack("<I", 0))], 8
    )
    exif_ifd_offset = 8 + len(ifd0_size_placeholder)
    ifd0_final = _encode_ifd(
        ifd0 + [(TAG_EXIF_IFD, _LONG, struct.pack("<I", exif_ifd_offset))], 8
    )
    exif_final = _encode_ifd(exif, exif_ifd_offset)
    tiff = b"II" + struct.pack("<HI", 42, 8) + ifd0_final + exif_final
    return EXIF_HEADER + tiff


def strip_exif(jpeg_bytes: bytes) -> bytes:
    """Return the JPEG with any APP1 Exif segment removed."""
    return jpegio.remove_segments(
        jpeg_bytes,
        lambda seg: seg.marker == APP1 and seg.payload.startswith(EXIF_HEADER),
    )


def embed_exif(jpeg_bytes: bytes, meta: CaptureMetadata) -> bytes:
    """Return the JPEG with its EXIF replaced by one built from ``meta``."""
    segment = jpegio.build_segment(APP1, build_exif_app1(meta))
    return jpegio.insert_after_soi(strip_exif(jpeg_bytes), segment)


def copy_exif_bytes(source_jpeg: bytes, dest_jpeg: bytes) -> bytes:
    """Return dest with its EXIF replaced by source's APP1 block.

    Pixel data is untouched; only metadata segments are spliced.
    """
    for seg in jpegio.iter_segments(source_jpeg):
        if seg.marker == APP1 and seg.payload.startswith(EXIF_HEADER):
            app1 = jpegio.build_segment(APP1, seg.payload)
            break
    else:
        raise NoMetadataInSource("source JPEG has no EXIF block")
    return jpegio.insert_after_soi(strip_exif(dest_jpeg), app1)


def copy_exif(source_path: str | Path, dest_path: str | Path) -> None:
    """File-level copy_exif_bytes: splice source's EXIF into dest in place."""
    try:
        src = Path(source_path).read_bytes()
        dst = Path(dest_path).read_bytes()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    try:
        out = copy_exif_bytes(src, dst)
    except NoMetadataInSource:
        raise NoMetadataInSource(f"{source_path} has no EXIF block") from None
    try:
        Path(dest_path).write_bytes(out)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
