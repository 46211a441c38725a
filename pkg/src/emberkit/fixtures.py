"""Synthetic raw-collection generator for tests, demos, and golden runs.

Real burn imagery is large and not redistributable with the toolkit; these
fixtures stand in for it. The generated tree mimics a field collection:

    root/
      raw/      image pairs (plain RGB JPEG + reference radiometric JPEG)
                and optional video pairs, capture timestamps 5 s apart
      nadir/    a nadir plot: RGB/IR pairs of a constant-speed fire front
                advancing one pixel column per frame, plus gcps.csv

Everything derives from the seed; two runs with the same arguments produce
byte-identical trees.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np
from PIL import Image

from . import exifio, mp4meta
from .nadir import GroundControlPoint, write_gcps_csv
from .raster import CaptureMetadata, Modality, TemperatureRaster
from .rjpeg import encode_reference_rjpeg

FIXTURE_START = datetime(2023, 2, 5, 17, 48, 30, tzinfo=timezone.utc)
FIXTURE_CAMERA = "REF640"
RGB_SIZE = (1000, 750)      # matches the REF640 camera profile
IR_SIZE = (640, 512)
NADIR_IR_SIZE = (24, 20)
NADIR_GSD = 0.05


@dataclass
class FixtureCounts:
    image_pairs: int
    video_pairs: int
    nadir_frames: int


def _terrain(rng, shape, lo=12.0, hi=32.0):
    """Smooth pseudo-terrain: blurred uniform noise scaled into [lo, hi]."""
    h, w = shape
    coarse = rng.uniform(0.0, 1.0, size=(max(h // 16, 2), max(w // 16, 2)))
    img = np.asarray(
        Image.fromarray((coarse * 255).astype(np.uint8)).resize((w, h), Image.BILINEAR),
        dtype=np.float64,
    )
    return lo + (hi - lo) * img / 255.0


def _blob(shape, cy, cx, sigma, peak):
    yy, xx = np.mgrid[0 : shape[0], 0 : shape[1]]
    return peak * np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * sigma**2))


def _thermal_scene(rng, kind: str) -> TemperatureRaster:
    """kind: 'fire' (max > 200), 'mid' (max in the review band), 'cold' (max < 80)."""
    w, h = IR_SIZE
    values = _terrain(rng, (h, w))
    if kind == "fire":
        for _ in range(int(rng.integers(2, 5))):
            values += _blob(
                (h, w), rng.uniform(0, h), rng.uniform(0, w),
                rng.uniform(6, 20), rng.uniform(260, 420),
            )
    elif kind == "mid":
        values += _blob(
            (h, w), rng.uniform(0, h), rng.uniform(0, w), rng.uniform(8, 16),
            rng.uniform(95, 140),
        )
    return TemperatureRaster(values)


def _rgb_scene(rng, thermal: TemperatureRaster) -> bytes:
    """Visible-band rendering: green/brown terrain with glow where it burns."""
    w, h = RGB_SIZE
    base = _terrain(rng, (h, w), lo=0.0, hi=1.0)
    r = 90 + 80 * base
    g = 110 + 60 * base
    b = 70 + 50 * base
    glow = np.asarray(
        Image.fromarray(
            np.clip((thermal.values - 100.0) / 3.0, 0, 255).astype(np.uint8)
        ).resize((w, h), Image.BILINEAR),
        dtype=np.float64,
    )
    rgb = np.stack([np.clip(r + glow, 0, 255), np.clip(g + glow * 0.55, 0, 255),
                    np.clip(b, 0, 255)], axis=2).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(rgb, "RGB").save(buf, format="JPEG", quality=90)
    return buf.getvalue()


def _meta(t: datetime, modality: Modality) -> CaptureMetadata:
    return CaptureMetadata(timestamp=t, camera_model=FIXTURE_CAMERA, modality=modality)


def _write_image_pair(root: Path, index: int, t: datetime, rng, kind: str) -> None:
    thermal = _thermal_scene(rng, kind)
    rgb_bytes = exifio.embed_exif(_rgb_scene(rng, thermal), _meta(t, Modality.RGB))
    (root / f"P{index:04d}_RGB.jpg").write_bytes(rgb_bytes)
    ir_t = t + timedelta(milliseconds=400)
    (root / f"P{index:04d}_IR.jpg").write_bytes(
        encode_reference_rjpeg(thermal, _meta(ir_t, Modality.THERMAL))
    )


def _nadir_front_frame(rng, index: int) -> TemperatureRaster:
    w, h = NADIR_IR_SIZE
    values = _terrain(rng, (h, w))
    values[:, : min(index + 1, w)] += 380.0
    return TemperatureRaster(values)


def nadir_gcps() -> list[GroundControlPoint]:
    """Plate layout for the synthetic plot: a pure 0.05 m/px scale."""
    w, h = NADIR_IR_SIZE
    cx, cy = w / 2, h / 2
    pixels = {
        "CENTER": (cx, cy),
        "NORTH": (cx, 1.0),
        "EAST": (w - 1.0, cy),
        "SOUTH": (cx, h - 1.0),
    }
    return [
        GroundControlPoint(name, p, (NADIR_GSD * p[0], NADIR_GSD * p[1]))
        for name, p in pixels.items()
    ]


def generate_fixture_tree(
    root: str | Path,
    image_pairs: int = 6,
    video_pairs: int = 1,
    nadir_frames: int | None = None,
    seed: int = 0,
) -> FixtureCounts:
    """Write the synthetic collection; returns what was generated.

    Image pair kinds cycle fire / cold / mid so every label band appears.
    nadir_frames defaults to the plot width so the front crosses the whole
    frame (every pixel ignites).
    """
    root = Path(root)
    raw = root / "raw"
    raw.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    kinds = ["fire", "cold", "mid"]
    for i in range(image_pairs):
        t = FIXTURE_START + timedelta(seconds=5.0 * i)
        _write_image_pair(raw, i, t, rng, kinds[i % 3])

    video_start = FIXTURE_START - timedelta(minutes=10)
    for i in range(video_pairs):
        t = video_start + timedelta(minutes=6 * i)
        (raw / f"V{i:04d}_RGB.mp4").write_bytes(mp4meta.write_minimal_mp4(t))
        (raw / f"V{i:04d}_IR.mp4").write_bytes(
            mp4meta.write_minimal_mp4(t + timedelta(seconds=1))
        )

    if nadir_frames is None:
        nadir_frames = NADIR_IR_SIZE[0]
    nadir = root / "nadir"
    nadir.mkdir(parents=True, exist_ok=True)
    nadir_start = FIXTURE_START + timedelta(minutes=30)
    for i in range(nadir_frames):
        t = nadir_start + timedelta(seconds=5.0 * i)
        frame = _nadir_front_frame(rng, i)
        rgb = exifio.embed_exif(_rgb_small(rng), _meta(t, Modality.RGB))
        (nadir / f"N{i:04d}_RGB.jpg").write_bytes(rgb)
        (nadir / f"N{i:04d}_IR.jpg").write_bytes(
            encode_reference_rjpeg(frame, _meta(t + timedelta(milliseconds=200), Modality.THERMAL))
        )
    write_gcps_csv(nadir_gcps(), nadir / "gcps.csv")

    return FixtureCounts(
        image_pairs=image_pairs, video_pairs=video_pairs, nadir_frames=nadir_frames
    )


def _rgb_small(rng) -> bytes:
    img = (_terrain(rng, (60, 75), lo=0, hi=255)).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(np.stack([img] * 3, axis=2), "RGB").save(buf, format="JPEG", quality=85)
    return buf.getvalue()
