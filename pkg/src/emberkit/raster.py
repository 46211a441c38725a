"""Core raster and capture-metadata types shared by every stage of the pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum

import numpy as np


class Modality(Enum):
    RGB = "RGB"
    THERMAL = "THERMAL"


@dataclass
class TemperatureRaster:
    """Single-band 2-D grid of per-pixel temperatures in degrees C.

    ``values`` is a (height, width) float64 array in memory (persisted rasters
    are float32 TIFFs). ``quantization_step`` is the smallest increment
    representable by the source encoding (the codec's scale), 0.0 for rasters
    that never went through a quantized container.
    """

    values: np.ndarray
    quantization_step: float = 0.0

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError(f"raster must be 2-D, got shape {self.values.shape}")
        if self.values.shape[0] <= 0 or self.values.shape[1] <= 0:
            raise ValueError("raster dimensions must be positive")
        if not np.isfinite(self.values).all():
            raise ValueError("raster contains non-finite temperatures")

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def max_temp(self) -> float:
        return float(self.values.max())

    @property
    def min_temp(self) -> float:
        return float(self.values.min())


def utc(dt: datetime) -> datetime:
    """Coerce a datetime to timezone-aware UTC (naive input is assumed UTC)."""
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


@dataclass
class CaptureMetadata:
    """Capture info extracted from (or destined for) an image/video container.

    ``extra`` is an opaque passthrough of additional metadata tags (gimbal,
    exposure, ...) that the pipeline preserves but never interprets.
    """

    timestamp: datetime
    camera_model: str = ""
    image_width: int = 0
    image_height: int = 0
    modality: Modality = Modality.RGB
    extra: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.timestamp = utc(self.timestamp)
        if not (2000 <= self.timestamp.year <= 2100):
            raise ValueError(f"capture timestamp out of supported range: {self.timestamp}")

    def iso(self) -> str:
        return self.timestamp.isoformat(timespec="milliseconds")
