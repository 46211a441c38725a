"""Regenerate human-readable thermal JPEGs with a standardized palette.

Vendor cameras color thermal imagery with proprietary maps; rendering from
the raw temperatures with a known palette makes imagery comparable across
camera brands. Shows per-image min-max vs fixed-range normalization.
"""

import tempfile
from pathlib import Path

import numpy as np

from emberkit import NormalizationMode, TemperatureRaster, inferno, normalize, render_thermal_jpeg
from emberkit.colormap import render_normalized_png

out = Path(tempfile.mkdtemp(prefix="emberkit_demo_"))

yy, xx = np.mgrid[0:512, 0:640]
values = 18.0 + 320.0 * np.exp(-((yy - 256) ** 2 + (xx - 320) ** 2) / (2 * 90.0**2))
raster = TemperatureRaster(values)

palette = inferno()
print(f"palette {palette.name}: first entry {palette.entries[0].tolist()}, "
      f"last {palette.entries[255].tolist()}")

for mode, name in [
    (NormalizationMode.minmax(), "minmax"),
    (NormalizationMode.fixed(0.0, 400.0), "fixed_0_400"),
]:
    idx = normalize(raster, mode)
    jpeg = render_thermal_jpeg(raster, palette, mode)
    (out / f"thermal_{name}.jpg").write_bytes(jpeg)
    print(f"{name}: index range {idx.indices.min()}..{idx.indices.max()}, "
          f"jpeg {len(jpeg):,} bytes, degenerate={idx.degenerate}")

(out / "normalized.png").write_bytes(
    render_normalized_png(raster, NormalizationMode.fixed(0.0, 400.0))
)
print(f"wrote renders to {out}")
