"""Reference radiometric JPEG container: encode, decode, and decoder registry.

Vendor radiometric encodings are proprietary, so the toolkit defines an open
reference container (see docs/format.md): a normal JPEG whose APP7 segments
carry a chunked ``FLMR`` payload of u16 temperature samples plus an affine
scale/offset. Temperatures decode as ``raw * scale + offset`` in float64.

``decode_rjpeg`` consults a decoder registry so real vendor formats can be
added without touching call sites; the reference decoder is always installed.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from typing import Callable

import numpy as np
from PIL import Image

from . import exifio, jpegio
from .errors import CorruptPayload, MissingRadiometricPayload, NotAJpeg, ValueOutOfEncodableRange
from .raster import CaptureMetadata, Modality, TemperatureRaster
from .util import round_half_away

APP7 = 0xE7
MAGIC = b"FLMR"
VERSION = 1

# Default fixture quantization: deci-Kelvin (0.1 degC/unit anchored at 0 K).
DEFAULT_SCALE = 0.1
DEFAULT_OFFSET = -273.15

# Logical stream header after the 4-byte magic. Scale/offset are f64: with f32
# constants, half a quantum is 0.0500000007 degC and the documented half-step
# round-trip bound fails at the margin.
_HEADER = struct.Struct("<BHHddI")  # version, width, height, scale, offset, payload length
# Per-APP7 chunk header after the 4-byte magic.
_CHUNK = struct.Struct("<HH")  # chunk index, chunk count
_CHUNK_BYTES = 60000

_VISUAL_QUALITY = 95


@dataclass
class RadiometricPayload:
    """Raw u16 samples plus the affine quantization that maps them to degC."""

    raw: np.ndarray       # (height, width) uint16
    scale: float          # degC per raw unit, > 0
    offset: float         # degC at raw == 0
    width: int
    height: int

    def to_raster(self) -> TemperatureRaster:
        values = self.raw.astype(np.float64) * float(self.scale) + float(self.offset)
        return TemperatureRaster(values, quantization_step=float(self.scale))


def _payload_stream(raster: TemperatureRaster, scale: float, offset: float) -> bytes:
    values = raster.values
    lo, hi = offset, offset + 65535.0 * scale
    if values.min() < lo or values.max() > hi:
        raise ValueOutOfEncodableRange(
            f"raster range [{values.min():.2f}, {values.max():.2f}] degC exceeds "
            f"encodable [{lo:.2f}, {hi:.2f}]"
        )
    # Half-away-from-zero with a one-nano-count guard: decimal-exact half
    # boundaries (0 degC at deci-Kelvin quantization is raw 2731.5) must round
    # up even though binary float division lands a hair below the half.
    counts = (values - offset) / scale
    raw = np.clip(np.floor(counts + 0.5 + 1e-9), 0, 65535).astype(np.uint16)
    samples = raw.tobytes()  # row-major little-endian on all supported platforms
    header = MAGIC + _HEADER.pack(
        VERSION, raster.width, raster.height, scale, offset, len(samples)
    )
    return header + samples


def _chunk_segments(stream: bytes) -> bytes:
    chunks = [stream[i : i + _CHUNK_BYTES] for i in range(0, len(stream), _CHUNK_BYTES)]
    out = b""
    for index, chunk in enumerate(chunks):
        body = MAGIC + _CHUNK.pack(index, len(chunks)) + chunk
        out += jpegio.build_segment(APP7, body)
    return out


def _visual_band(raster: TemperatureRaster) -> bytes:
    values = raster.values
    span = values.max() - values.min()
    if span <= 0:
        gray = np.zeros(values.shape, dtype=np.uint8)
    else:
        gray = round_half_away((values - values.min()) / span * 255.0).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(gray, mode="L").save(buf, format="JPEG", quality=_VISUAL_QUALITY)
    return buf.getvalue()


def encode_reference_rjpeg(
    raster: TemperatureRaster,
    meta: CaptureMetadata,
    scale: float = DEFAULT_SCALE,
    offset: float = DEFAULT_OFFSET,
) -> bytes:
    """Serialize a raster + metadata as a reference radiometric JPEG.

    The visual band is a grayscale min-max rendering; the radiometric payload
    rides in chunked APP7 segments. decode_rjpeg inverts this to within one
    half quantization step.
    """
    stream = _payload_stream(raster, scale, offset)
    base = _visual_band(raster)
    with_exif = exifio.embed_exif(base, meta)
    return jpegio.insert_after_soi(with_exif, _chunk_segments(stream))


def parse_payload(jpeg_bytes: bytes) -> RadiometricPayload:
    """Reassemble and validate the FLMR payload from a JPEG's APP7 segments."""
    chunks: dict[int, bytes] = {}
    count: int | None = None
    for seg in jpegio.iter_segments(jpeg_bytes):
        if seg.marker != APP7 or not seg.payload.startswith(MAGIC):
            continue
        if len(seg.payload) < 4 + _CHUNK.size:
            raise CorruptPayload("APP7 FLMR chunk too short")
        index, total = _CHUNK.unpack_from(seg.payload, 4)
        if count is None:
            count = total
        elif total != count:
            raise CorruptPayload("inconsistent chunk counts across APP7 segments")
        if index in chunks:
            raise CorruptPayload(f"duplicate chunk index {index}")
        chunks[index] = seg.payload[4 + _CHUNK.size :]
    if count is None:
        raise MissingRadiometricPayload("no APP7 FLMR segment present")
    if set(chunks) != set(range(count)):
        raise CorruptPayload(f"expected {count} chunks, found indices {sorted(chunks)}")

    stream = b"".join(chunks[i] for i in range(count))
    if len(stream) < 4 + _HEADER.size or not stream.startswith(MAGIC):
        raise CorruptPayload("payload stream truncated before header")
    version, width, height, scale, offset, length = _HEADER.unpack_from(stream, 4)
    if version != VERSION:
        raise CorruptPayload(f"unsupported payload version {version}")
    samples = stream[4 + _HEADER.size :]
    if width <= 0 or height <= 0 or length != 2 * width * height:
        raise CorruptPayload(
            f"declared {width}x{height} ({2 * width * height} bytes) but header says {length}"
        )
    if len(samples) != length:
        raise CorruptPayload(f"payload holds {len(samples)} bytes, header says {length}")
    if not (np.isfinite(scale) and np.isfinite(offset)) or scale <= 0:
        raise CorruptPayload(f"bad quantization scale={scale} offset={offset}")
    raw = np.frombuffer(samples, dtype="<u2").reshape(height, width)
    return RadiometricPayload(raw=raw, scale=scale, offset=offset, width=width, height=height)


def _decode_reference(jpeg_bytes: bytes) -> tuple[TemperatureRaster, CaptureMetadata]:
    payload = parse_payload(jpeg_bytes)
    raster = payload.to_raster()
    tags = exifio.parse_exif_tags(jpeg_bytes)
    if tags is None:
        raise CorruptPayload("radiometric container lacks an EXIF capture block")
    dims = jpegio.jpeg_dimensions(jpeg_bytes) or (payload.width, payload.height)
    try:
        meta = exifio.metadata_from_tags(tags, dims[0], dims[1], Modality.THERMAL)
    except ValueError as exc:
        raise CorruptPayload(f"capture metadata unusable: {exc}") from exc
    return raster, meta


def _probe_reference(jpeg_bytes: bytes) -> bool:
    try:
        return any(
            seg.marker == APP7 and seg.payload.startswith(MAGIC)
            for seg in jpegio.iter_segments(jpeg_bytes)
        )
    except NotAJpeg:
        return False


@dataclass
class RadiometricDecoder:
    name: str
    probe: Callable[[bytes], bool]
    decode: Callable[[bytes], tuple[TemperatureRaster, CaptureMetadata]]


_DECODERS: list[RadiometricDecoder] = [
    RadiometricDecoder("reference", _probe_reference, _decode_reference),
]


def register_decoder(decoder: RadiometricDecoder) -> None:
    """Install a vendor decoder ahead of the reference one."""
    _DECODERS.insert(0, decoder)


def has_radiometric_payload(jpeg_bytes: bytes) -> bool:
    """True when any registered decoder recognizes a payload in the container."""
    return any(d.probe(jpeg_bytes) for d in _DECODERS)


def decode_rjpeg(jpeg_bytes: bytes) -> tuple[TemperatureRaster, CaptureMetadata]:
    """Decode a radiometric JPEG into a temperature raster plus capture metadata.

    Raises NotAJpeg for non-JPEG bytes and MissingRadiometricPayload when no
    registered decoder recognizes the container.
    """
    if len(jpeg_bytes) < 2 or jpeg_bytes[:2] != jpegio.SOI:
        raise NotAJpeg("missing SOI marker")
    for decoder in _DECODERS:
        if decoder.probe(jpeg_bytes):
            return decoder.decode(jpeg_bytes)
    raise MissingRadiometricPayload("no registered decoder recognizes this container")
