"""Round-trip a temperature raster through the radiometric JPEG container.

Builds a synthetic flame scene, encodes it as a reference rJPEG (a normal
JPEG carrying the temperature payload in APP7 segments), decodes it back,
and persists the raster as a float32 TIFF.
"""

import tempfile
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from emberkit import (
    CaptureMetadata,
    Modality,
    TemperatureRaster,
    decode_rjpeg,
    encode_reference_rjpeg,
    read_tiff,
    write_tiff,
)

out = Path(tempfile.mkdtemp(prefix="emberkit_demo_"))

# a warm field with one hot blob
yy, xx = np.mgrid[0:512, 0:640]
values = 22.0 + 6.0 * np.sin(xx / 80.0) + 350.0 * np.exp(
    -((yy - 300) ** 2 + (xx - 420) ** 2) / (2 * 40.0**2)
)
raster = TemperatureRaster(values)
meta = CaptureMetadata(
    timestamp=datetime(2023, 2, 5, 17, 48, 30, tzinfo=timezone.utc),
    camera_model="REF640",
    modality=Modality.THERMAL,
)

container = encode_reference_rjpeg(raster, meta)
(out / "thermal.jpg").write_bytes(container)
print(f"encoded {raster.width}x{raster.height} raster -> {len(container):,} byte rJPEG")

decoded, decoded_meta = decode_rjpeg(container)
err = np.abs(decoded.values - raster.values).max()
print(f"decoded back: max abs error {err:.4f} degC (quantization step "
      f"{decoded.quantization_step} degC)")
print(f"capture: {decoded_meta.camera_model} at {decoded_meta.iso()}")
print(f"scene max {decoded.max_temp:.1f} degC, min {decoded.min_temp:.1f} degC")

write_tiff(decoded, out / "thermal.tiff")
again = read_tiff(out / "thermal.tiff")
print(f"TIFF round-trip bit-exact at float32: "
      f"{bool((again.values == decoded.values.astype(np.float32)).all())}")
print(f"files in {out}")
