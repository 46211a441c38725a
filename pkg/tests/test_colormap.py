"""Normalization arithmetic, palette lookup, and render determinism."""

import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from emberkit.colormap import (
    NormalizationMode,
    Palette,
    apply_palette,
    inferno,
    normalize,
    render_normalized_png,
    render_thermal_jpeg,
)
from emberkit.raster import TemperatureRaster

from conftest import random_raster


def raster_of(*rows):
    return TemperatureRaster(np.array(rows, dtype=np.float64))


class TestNormalize:
    def test_minmax_endpoints(self):
        r = raster_of([10.0, 90.0])
        idx = normalize(r, NormalizationMode.minmax())
        assert idx.indices.tolist() == [[0, 255]]
        assert not idx.degenerate

    def test_constant_raster_degenerates_to_zero(self):
        r = raster_of([42.0, 42.0], [42.0, 42.0])
        idx = normalize(r, NormalizationMode.minmax())
        assert (idx.indices == 0).all()
        assert idx.degenerate

    def test_fixed_range_midpoint(self):
        # scripted check of the formula: round(255 * (200-0)/(400-0)) = round(127.5) = 128
        r = raster_of([200.0])
        idx = normalize(r, NormalizationMode.fixed(0.0, 400.0))
        assert idx.indices[0, 0] == 128

    def test_fixed_range_clamps(self):
        r = raster_of([-50.0, 0.0, 400.0, 900.0])
        idx = normalize(r, NormalizationMode.fixed(0.0, 400.0))
        assert idx.indices.tolist() == [[0, 0, 255, 255]]

    def test_fixed_range_requires_order(self):
        with pytest.raises(ValueError):
            NormalizationMode.fixed(10.0, 10.0)

    @given(
        temps=st.lists(
            st.floats(min_value=-50, max_value=700, allow_nan=False), min_size=2, max_size=40
        ),
        fixed=st.booleans(),
    )
    @settings(max_examples=150, deadline=None)
    def test_monotone_in_temperature(self, temps, fixed):
        r = TemperatureRaster(np.array([temps]))
        mode = NormalizationMode.fixed(0.0, 400.0) if fixed else NormalizationMode.minmax()
        idx = normalize(r, mode).indices[0]
        order = np.argsort(temps, kind="stable")
        assert (np.diff(idx[order].astype(int)) >= 0).all()


class TestPalette:
    def test_loads_exactly_256_entries(self):
        pal = inferno()
        assert pal.entries.shape == (256, 3)

    def test_inferno_is_injective(self):
        pal = inferno()
        assert len({tuple(row) for row in pal.entries.tolist()}) == 256

    def test_inferno_table_endpoints(self):
        # first and last rows of the shipped 256-entry lookup table
        pal = inferno()
        assert pal.entries[0].tolist() == [0, 0, 4]
        assert pal.entries[255].tolist() == [252, 255, 164]

    def test_wrong_size_rejected(self):
        with pytest.raises(ValueError):
            Palette("broken", np.zeros((10, 3), dtype=np.uint8))

    def test_every_index_maps_to_table_color(self, rng):
        pal = inferno()
        r = random_raster(rng, 9, 11, lo=0, hi=500)
        idx = normalize(r, NormalizationMode.minmax())
        img = apply_palette(idx, pal)
        assert (img == pal.entries[idx.indices]).all()


class TestRender:
    def test_equal_temperatures_equal_colors(self):
        r = raster_of([25.0, 300.0, 25.0], [300.0, 25.0, 300.0])
        img = apply_palette(normalize(r, NormalizationMode.minmax()), inferno())
        assert (img[0, 0] == img[0, 2]).all()
        assert (img[0, 1] == img[1, 0]).all()

    def test_render_is_byte_deterministic(self, rng):
        r = random_raster(rng, 32, 48, lo=0, hi=450)
        mode = NormalizationMode.minmax()
        assert render_thermal_jpeg(r, inferno(), mode) == render_thermal_jpeg(r, inferno(), mode)

    def test_full_sensor_dimensions(self, rng):
        r = random_raster(rng, 512, 640, lo=0, hi=450)
        data = render_thermal_jpeg(r, inferno(), NormalizationMode.minmax())
        assert Image.open(io.BytesIO(data)).size == (640, 512)

    def test_degenerate_renders_first_palette_entry(self):
        r = raster_of([21.0, 21.0])
        img = apply_palette(normalize(r, NormalizationMode.minmax()), inferno())
        assert (img == inferno().entries[0]).all()

    def test_normalized_png_endpoint_bytes(self):
        r = raster_of([0.0, 400.0])
        png = render_normalized_png(r, NormalizationMode.fixed(0.0, 400.0))
        arr = np.asarray(Image.open(io.BytesIO(png)))
        assert arr.tolist() == [[0, 255]]
