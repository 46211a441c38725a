"""Float TIFF round-trips, layout rejection, and Pillow interop."""

import numpy as np
import pytest
from PIL import Image

from emberkit.errors import IoFailure, UnsupportedTiffLayout
from emberkit.tiffio import read_array_tiff, read_tiff, write_array_tiff, write_tiff

from conftest import random_raster, random_raster_f32


def test_write_read_bit_exact_full_sensor(rng, tmp_path):
    raster = random_raster_f32(rng, 512, 640)
    path = tmp_path / "r.tiff"
    write_tiff(raster, path)
    back = read_tiff(path)
    assert (back.values == raster.values).all()


def test_write_read_is_exact_at_float32_precision(rng, tmp_path):
    # In-memory rasters are float64; persistence is float32, bit-exact there.
    raster = random_raster(rng, 15, 9)
    path = tmp_path / "f64.tiff"
    write_tiff(raster, path)
    back = read_tiff(path)
    assert (back.values == raster.values.astype(np.float32).astype(np.float64)).all()


def test_array_round_trip_keeps_nan(tmp_path):
    arr = np.array([[1.5, np.nan], [0.0, -7.25]], dtype=np.float32)
    path = tmp_path / "a.tiff"
    write_array_tiff(path, arr)
    back = read_array_tiff(path)
    assert np.array_equal(back, arr, equal_nan=True)


def test_rgb_tiff_rejected(tmp_path):
    path = tmp_path / "rgb.tiff"
    Image.new("RGB", (6, 4), (1, 2, 3)).save(path, format="TIFF")
    with pytest.raises(UnsupportedTiffLayout):
        read_tiff(path)


def test_integer_tiff_rejected(tmp_path):
    path = tmp_path / "gray.tiff"
    Image.new("L", (6, 4), 9).save(path, format="TIFF")
    with pytest.raises(UnsupportedTiffLayout):
        read_tiff(path)


def test_non_tiff_rejected(tmp_path):
    path = tmp_path / "junk.tiff"
    path.write_bytes(b"this is not a tiff at all")
    with pytest.raises(UnsupportedTiffLayout):
        read_tiff(path)


def test_missing_file_is_io_failure(tmp_path):
    with pytest.raises(IoFailure):
        read_tiff(tmp_path / "absent.tiff")


def test_pillow_reads_our_tiff(rng, tmp_path):
    raster = random_raster_f32(rng, 30, 20)
    path = tmp_path / "ours.tiff"
    write_tiff(raster, path)
    img = Image.open(path)
    assert img.mode == "F"
    assert (np.asarray(img) == raster.values).all()


def test_we_read_pillow_float_tiff(rng, tmp_path):
    arr = rng.uniform(-20, 600, size=(11, 13)).astype(np.float32)
    path = tmp_path / "pillow.tiff"
    Image.fromarray(arr, mode="F").save(path, format="TIFF")
    assert (read_array_tiff(path) == arr).all()
