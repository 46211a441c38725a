"""Temperature-to-color rendering with shipped 256-entry palettes.

Vendor thermal JPEGs color irradiance with proprietary maps; the pipeline
regenerates display JPEGs from the decoded temperatures with a known palette
(inferno by default) so imagery is comparable across camera brands.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from importlib import resources

import numpy as np
from PIL import Image

from .raster import TemperatureRaster
from .util import round_half_away

JPEG_QUALITY = 95


@dataclass(frozen=True)
class Palette:
    """Ordered 256-entry index -> (R, G, B) lookup table."""

    name: str
    entries: np.ndarray  # (256, 3) uint8

    def __post_init__(self) -> None:
        if self.entries.shape != (256, 3):
            raise ValueError(f"palette must have exactly 256 RGB entries, got {self.entries.shape}")

    @classmethod
    def load(cls, name: str) -> "Palette":
        """Load a named palette from the packaged CSV assets (index,R,G,B)."""
        text = resources.files("emberkit.data").joinpath(f"{name}.csv").read_text()
        rows = [line.split(",") for line in text.strip().splitlines()[1:]]
        table = np.zeros((256, 3), dtype=np.uint8)
        for idx, r, g, b in rows:
            table[int(idx)] = (int(r), int(g), int(b))
        return cls(name=name, entries=table)


def inferno() -> Palette:
    return Palette.load("inferno")


@dataclass(frozen=True)
class NormalizationMode:
    """How temperatures map onto the 0-255 index range.

    Per-image min-max (default for viewing) or a fixed degC range (for ML
    export, comparable across frames).
    """

    fixed_range: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.fixed_range is not None:
            lo, hi = self.fixed_range
            if not lo < hi:
                raise ValueError(f"fixed range needs lo < hi, got ({lo}, {hi})")

    @classmethod
    def minmax(cls) -> "NormalizationMode":
        return cls(None)

    @classmethod
    def fixed(cls, lo: float, hi: float) -> "NormalizationMode":
        return cls((lo, hi))


@dataclass
class IndexRaster:
    """0-255 byte indices plus a flag for the constant-raster degenerate case."""

    indices: np.ndarray  # (height, width) uint8
    degenerate: bool = False


def normalize(raster: TemperatureRaster, mode: NormalizationMode) -> IndexRaster:
    """Map temperatures to byte indices: clamp(round(255*(T-lo)/(hi-lo)), 0, 255).

    Rounding is half-away-from-zero. A constant raster under per-image min-max
    has no defined range; it normalizes to all zeros with the degenerate flag
    set rather than failing (blank frames occur in real collections and must
    not abort batches).
    """
    values = raster.values.astype(np.float64)
    if mode.fixed_range is not None:
        lo, hi = mode.fixed_range
    else:
        lo, hi = float(values.min()), float(values.max())
        if hi == lo:
            return IndexRaster(np.zeros(values.shape, dtype=np.uint8), degenerate=True)
    scaled = round_half_away(255.0 * (values - lo) / (hi - lo))
    return IndexRaster(np.clip(scaled, 0, 255).astype(np.uint8))


def apply_palette(index: IndexRaster, palette: Palette) -> np.ndarray:
    """Expand byte indices to an (H, W, 3) uint8 image via table lookup."""
    return palette.entries[index.indices]


def render_thermal_jpeg(
    raster: TemperatureRaster,
    palette: Palette,
    mode: NormalizationMode,
) -> bytes:
    """Render a raster to JPEG bytes; identical inputs give identical bytes."""
    rgb = apply_palette(normalize(raster, mode), palette)
    buf = io.BytesIO()
    Image.fromarray(rgb, mode="RGB").save(buf, format="JPEG", quality=JPEG_QUALITY)
    return buf.getvalue()


def render_normalized_png(raster: TemperatureRaster, mode: NormalizationMode) -> bytes:
    """Render the 0-255 normalized single-band image as grayscale PNG bytes."""
    index = normalize(raster, mode)
    buf = io.BytesIO()
    Image.fromarray(index.indices, mode="L").save(buf, format="PNG")
    return buf.getvalue()
