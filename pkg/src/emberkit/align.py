"""Field-of-view correction between wide RGB frames and narrow thermal frames.

The transform family is axis-aligned anisotropic scale + translation over a
crop window (no rotation, no lens model): thermal-frame position (u, v) samples
the source RGB at ``crop_offset + ((u - translate) / scale)`` with bilinear
interpolation. Residual lens distortion is measured (ErrorMap), not corrected.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .colormap import NormalizationMode, Palette, apply_palette, inferno, normalize
from .errors import (
    CropOutOfBounds,
    DimensionMismatch,
    EmptyInput,
    InsufficientCorrespondences,
)
from .raster import TemperatureRaster
from .util import round_half_away

Point = tuple[float, float]


@dataclass(frozen=True)
class Rect:
    x: int
    y: int
    w: int
    h: int


@dataclass
class AlignmentParams:
    """rgb -> thermal mapping: u = scale_x*(x - crop.x) + translate_x (same for y).

    crop=None means the full source frame.
    """

    scale_x: float = 1.0
    scale_y: float = 1.0
    translate_x: float = 0.0
    translate_y: float = 0.0
    crop: Rect | None = None

    def __post_init__(self) -> None:
        if self.scale_x <= 0 or self.scale_y <= 0:
            raise ValueError(f"scales must be positive, got ({self.scale_x}, {self.scale_y})")

    def forward(self, points: np.ndarray) -> np.ndarray:
        """Map (N, 2) RGB-frame points into the thermal frame."""
        cx = self.crop.x if self.crop else 0.0
        cy = self.crop.y if self.crop else 0.0
        pts = np.asarray(points, dtype=np.float64)
        return np.stack(
            [
                self.scale_x * (pts[:, 0] - cx) + self.translate_x,
                self.scale_y * (pts[:, 1] - cy) + self.translate_y,
            ],
            axis=1,
        )


@dataclass
class CameraProfile:
    camera_model: str
    rgb_resolution: tuple[int, int]   # (w, h)
    ir_resolution: tuple[int, int]    # (w, h)
    default_params: AlignmentParams

    def __post_init__(self) -> None:
        if min(*self.rgb_resolution, *self.ir_resolution) <= 0:
            raise ValueError("camera resolutions must be positive")


@dataclass
class ErrorMap:
    """Euclidean residuals (pixels) at thermal-frame positions."""

    points: list[tuple[Point, float]]
    mean: float = field(init=False)
    max: float = field(init=False)

    def __post_init__(self) -> None:
        residuals = [r for _, r in self.points]
        self.mean = float(np.mean(residuals))
        self.max = float(np.max(residuals))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "y", "residual_px"])
        for (x, y), r in self.points:
            writer.writerow([f"{x:.3f}", f"{y:.3f}", f"{r:.4f}"])
        return buf.getvalue()


def apply_alignment(
    rgb: np.ndarray, params: AlignmentParams, target: tuple[int, int]
) -> tuple[np.ndarray, np.ndarray]:
    """Warp an (H, W, 3) uint8 RGB image onto the thermal frame.

    Returns (image, out_of_bounds_mask): the image is exactly target-sized
    (target is (w, h)), sampled bilinearly; positions falling outside the crop
    window come back black with the mask set.
    """
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) image, got {rgb.shape}")
    src_h, src_w = rgb.shape[:2]
    crop = params.crop or Rect(0, 0, src_w, src_h)
    if crop.w <= 0 or crop.h <= 0 or crop.x < 0 or crop.y < 0 \
            or crop.x + crop.w > src_w or crop.y + crop.h > src_h:
        raise CropOutOfBounds(f"crop {crop} outside {src_w}x{src_h} source")
    tw, th = target
    if tw <= 0 or th <= 0:
        raise ValueError(f"target dimensions must be positive, got {target}")

    u = np.arange(tw, dtype=np.float64)
    v = np.arange(th, dtype=np.float64)
    sx = crop.x + (u - params.translate_x) / params.scale_x   # (tw,)
    sy = crop.y + (v - params.translate_y) / params.scale_y   # (th,)
    x_lo, x_hi = crop.x, crop.x + crop.w - 1
    y_lo, y_hi = crop.y, crop.y + crop.h - 1
    valid = ((sy >= y_lo) & (sy <= y_hi))[:, None] & ((sx >= x_lo) & (sx <= x_hi))[None, :]

    sxc = np.clip(sx, x_lo, x_hi)
    syc = np.clip(sy, y_lo, y_hi)
    x0 = np.floor(sxc).astype(np.intp)
    y0 = np.floor(syc).astype(np.intp)
    x1 = np.minimum(x0 + 1, x_hi)
    y1 = np.minimum(y0 + 1, y_hi)
    fx = (sxc - x0)[None, :, None]
    fy = (syc - y0)[:, None, None]

    # gather the four neighbors from the uint8 source, cast only the
    # target-sized patches (a full-frame float cast dwarfs everything else)
    def grab(ys, xs):
        return rgb[ys[:, None], xs[None, :]].astype(np.float64)

    top = grab(y0, x0) * (1 - fx) + grab(y0, x1) * fx
    bottom = grab(y1, x0) * (1 - fx) + grab(y1, x1) * fx
    out = top * (1 - fy) + bottom * fy
    out = np.clip(round_half_away(out), 0, 255).astype(np.uint8)
    out[~valid] = 0
    return out, ~valid


@dataclass
class AlignmentEstimate:
    params: AlignmentParams
    residuals: ErrorMap


def estimate_alignment(correspondences: list[tuple[Point, Point]]) -> AlignmentEstimate:
    """Least-squares axis-aligned scale + translation from (rgb, thermal) point pairs.

    Needs at least two correspondences with spread on both axes; a single
    point, coincident points, or points sharing one coordinate on an axis
    leave the scale indeterminate and raise InsufficientCorrespondences.
    """
    if len(correspondences) < 2:
        raise InsufficientCorrespondences(f"need >= 2 correspondences, got {len(correspondences)}")
    src = np.array([p for p, _ in correspondences], dtype=np.float64)
    dst = np.array([q for _, q in correspondences], dtype=np.float64)

    scales, translates = [], []
    for axis in range(2):
        x, u = src[:, axis], dst[:, axis]
        var = float(np.mean((x - x.mean()) ** 2))
        if var == 0.0:
            raise InsufficientCorrespondences(
                f"no spread on {'xy'[axis]} axis; scale indeterminate"
            )
        scale = float(np.mean((x - x.mean()) * (u - u.mean())) / var)
        if scale <= 0:
            raise InsufficientCorrespondences(
                f"non-positive least-squares scale on {'xy'[axis]} axis"
            )
        scales.append(scale)
        translates.append(float(u.mean() - scale * x.mean()))

    params = AlignmentParams(
        scale_x=scales[0], scale_y=scales[1],
        translate_x=translates[0], translate_y=translates[1],
    )
    predicted = params.forward(src)
    residuals = ErrorMap(
        points=[
            (tuple(d), float(np.hypot(*(p - d))))
            for p, d in zip(predicted, dst)
        ]
    )
    return AlignmentEstimate(params=params, residuals=residuals)


def alignment_error(pairs: list[tuple[Point, Point]]) -> ErrorMap:
    """Euclidean residual per (expected, observed) point pair, with mean/max."""
    if not pairs:
        raise EmptyInput("alignment_error needs at least one point pair")
    points = []
    for expected, observed in pairs:
        dx = observed[0] - expected[0]
        dy = observed[1] - expected[1]
        points.append(((float(expected[0]), float(expected[1])), math.hypot(dx, dy)))
    return ErrorMap(points=points)


def overlay(
    rgb: np.ndarray,
    raster: TemperatureRaster,
    threshold: float,
    opacity: float,
    palette: Palette | None = None,
    mode: NormalizationMode | None = None,
) -> np.ndarray:
    """Tint pixels at or above the temperature threshold with the palette color.

    rgb must already be aligned to the raster (same dimensions). opacity 0
    returns the RGB input unchanged; opacity 1 replaces hot pixels outright.
    """
    rgb = np.asarray(rgb)
    if rgb.shape[:2] != raster.values.shape:
        raise DimensionMismatch(
            f"rgb {rgb.shape[:2]} vs raster {raster.values.shape}"
        )
    if not 0.0 <= opacity <= 1.0:
        raise ValueError(f"opacity must be within [0, 1], got {opacity}")
    palette = palette or inferno()
    mode = mode or NormalizationMode.minmax()
    tint = apply_palette(normalize(raster, mode), palette).astype(np.float64)
    hot = raster.values >= threshold
    out = rgb.astype(np.float64).copy()
    out[hot] = (1.0 - opacity) * out[hot] + opacity * tint[hot]
    return np.clip(round_half_away(out), 0, 255).astype(np.uint8)


def derive_default_params(rgb_resolution: tuple[int, int], ir_resolution: tuple[int, int]) -> AlignmentParams:
    """Centered aspect-matching crop of the RGB frame scaled onto the IR frame."""
    rw, rh = rgb_resolution
    iw, ih = ir_resolution
    crop_w = min(rw, round(rh * iw / ih))
    crop_h = min(rh, round(crop_w * ih / iw))
    crop = Rect((rw - crop_w) // 2, (rh - crop_h) // 2, crop_w, crop_h)
    return AlignmentParams(
        scale_x=iw / crop_w, scale_y=ih / crop_h,
        translate_x=0.0, translate_y=0.0, crop=crop,
    )


def _profile_from_section(name: str, sec: configparser.SectionProxy) -> CameraProfile:
    rgb_res = (sec.getint("rgb_width"), sec.getint("rgb_height"))
    ir_res = (sec.getint("ir_width"), sec.getint("ir_height"))
    params = derive_default_params(rgb_res, ir_res)
    if "scale_x" in sec:
        params = AlignmentParams(
            scale_x=sec.getfloat("scale_x"),
            scale_y=sec.getfloat("scale_y"),
            translate_x=sec.getfloat("translate_x", 0.0),
            translate_y=sec.getfloat("translate_y", 0.0),
            crop=Rect(
                sec.getint("crop_x"), sec.getint("crop_y"),
                sec.getint("crop_w"), sec.getint("crop_h"),
            ) if "crop_x" in sec else None,
        )
    return CameraProfile(
        camera_model=name, rgb_resolution=rgb_res, ir_resolution=ir_res, default_params=params
    )


def load_profiles(path: str | Path | None = None) -> dict[str, CameraProfile]:
    """Load camera profiles from a key-value profiles file (packaged default).

    Format: one ``[MODEL]`` section per camera with rgb_width/rgb_height/
    ir_width/ir_height and optional explicit scale/translate/crop overrides.
    """
    parser = configparser.ConfigParser()
    if path is None:
        parser.read_string(resources.files("emberkit.data").joinpath("profiles.toml").read_text())
    else:
        with open(path) as fh:
            parser.read_file(fh)
    return {name: _profile_from_section(name, parser[name]) for name in parser.sections()}
