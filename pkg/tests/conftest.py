"""Shared fixtures: canonical rasters and metadata used across the suite."""

from datetime import datetime, timezone

import numpy as np
import pytest

from emberkit.raster import CaptureMetadata, Modality, TemperatureRaster

BASE_TIME = datetime(2023, 2, 5, 17, 48, 30, tzinfo=timezone.utc)


@pytest.fixture
def rng():
    return np.random.default_rng(20230205)


@pytest.fixture
def thermal_meta():
    return CaptureMetadata(
        timestamp=BASE_TIME,
        camera_model="REF640",
        image_width=640,
        image_height=512,
        modality=Modality.THERMAL,
    )


@pytest.fixture
def small_raster():
    values = np.array(
        [[20.0, 25.5, 30.0],
         [150.0, 300.25, 45.0]],
        dtype=np.float32,
    )
    return TemperatureRaster(values)


def random_raster(rng, height, width, lo=-20.0, hi=600.0):
    return TemperatureRaster(rng.uniform(lo, hi, size=(height, width)))


def random_raster_f32(rng, height, width, lo=-20.0, hi=600.0):
    """Raster whose values are exactly float32-representable (TIFF round-trips)."""
    return TemperatureRaster(rng.uniform(lo, hi, size=(height, width)).astype(np.float32))
