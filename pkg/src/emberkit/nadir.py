"""Nadir-plot temporal products: stacks, georeferencing, arrival time, spread, energy.

A nadir stack is repeat straight-down thermal imagery of a fixed plot at a
nominal 5 s interval (battery swaps leave gaps, which are reported rather than
interpolated). Products derived per pixel: first time the ignition threshold
is met (arrival), front speed from the arrival-time gradient, and a
degree-second time integral above ambient as an energy-release proxy (true
fire radiative energy needs emissivity physics that is out of scope).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

import numpy as np

from . import rjpeg
from .errors import CollinearGcps, EmptyStack, InsufficientGcps, MixedDimensions
from .pairing import PairRecord
from .raster import TemperatureRaster
from .tiffio import write_array_tiff

DEFAULT_NOMINAL_INTERVAL_S = 5.0
DEFAULT_IGNITION_THRESHOLD_C = 200.0
GRADIENT_EPSILON_S_PER_PX = 1e-6


@dataclass
class GroundControlPoint:
    """Surveyed plate location: thermal-frame pixel vs world position (meters)."""

    name: str                     # CENTER / NORTH / EAST / SOUTH by convention
    pixel: tuple[float, float]    # (u, v)
    world: tuple[float, float]    # (easting, northing)


@dataclass
class StackFrame:
    timestamp: datetime
    raster: TemperatureRaster


@dataclass
class Gap:
    after_frame: int
    start: datetime
    end: datetime

    @property
    def seconds(self) -> float:
        return (self.end - self.start).total_seconds()


@dataclass
class NadirStack:
    plot_id: str
    frames: list[StackFrame]
    gcps: list[GroundControlPoint] = field(default_factory=list)
    nominal_interval_s: float = DEFAULT_NOMINAL_INTERVAL_S
    gaps: list[Gap] = field(default_factory=list)
    gsd: float | None = None      # meters/pixel, set by georeference()

    @property
    def duration_s(self) -> float:
        return (self.frames[-1].timestamp - self.frames[0].timestamp).total_seconds()

    @property
    def shape(self) -> tuple[int, int]:
        return self.frames[0].raster.values.shape

    def relative_seconds(self) -> np.ndarray:
        t0 = self.frames[0].timestamp
        return np.array([(f.timestamp - t0).total_seconds() for f in self.frames])

    def values(self) -> np.ndarray:
        """(n_frames, height, width) temperature cube."""
        return np.stack([f.raster.values for f in self.frames])


def assemble_stack(
    frames: list[tuple[datetime, TemperatureRaster]],
    plot_id: str = "plot",
    nominal_interval_s: float = DEFAULT_NOMINAL_INTERVAL_S,
    gcps: list[GroundControlPoint] | None = None,
) -> NadirStack:
    """Order frames by timestamp, validate dimensions, and report gaps > 2x nominal."""
    if not frames:
        raise EmptyStack("no frames to stack")
    ordered = sorted(frames, key=lambda f: f[0])
    shape = ordered[0][1].values.shape
    for _, raster in ordered:
        if raster.values.shape != shape:
            raise MixedDimensions(
                f"stack mixes {shape} and {raster.values.shape} rasters"
            )
    times = [t for t, _ in ordered]
    for a, b in zip(times, times[1:]):
        if a == b:
            raise ValueError(f"duplicate frame timestamp {a.isoformat()}")
    gaps = [
        Gap(after_frame=i, start=a, end=b)
        for i, (a, b) in enumerate(zip(times, times[1:]))
        if (b - a).total_seconds() > 2 * nominal_interval_s
    ]
    return NadirStack(
        plot_id=plot_id,
        frames=[StackFrame(t, r) for t, r in ordered],
        gcps=list(gcps or []),
        nominal_interval_s=nominal_interval_s,
        gaps=gaps,
    )


def build_stack(
    pairs: list[PairRecord],
    plot_id: str = "plot",
    nominal_interval_s: float = DEFAULT_NOMINAL_INTERVAL_S,
    gcps: list[GroundControlPoint] | None = None,
) -> NadirStack:
    """Assemble a stack by decoding each pair's radiometric thermal asset."""
    frames = []
    for pair in pairs:
        raster, meta = rjpeg.decode_rjpeg(pair.thermal.path.read_bytes())
        frames.append((meta.timestamp, raster))
    return assemble_stack(frames, plot_id, nominal_interval_s, gcps)


@dataclass
class Georeference:
    gsd: float                    # meters/pixel: mean singular value of the linear part
    transform: np.ndarray         # 2x3 affine: world = transform @ [u, v, 1]
    residuals: list[tuple[str, float]]   # per-GCP Euclidean error, meters

    def pixel_to_world(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        homo = np.column_stack([pts, np.ones(len(pts))])
        return homo @ self.transform.T


def georeference(stack: NadirStack, gcps: list[GroundControlPoint] | None = None) -> Georeference:
    """Least-squares affine pixel->world fit from the plot's control points.

    Needs >= 3 non-collinear GCPs. Sets stack.gsd as the mean singular value
    of the fitted linear part (isotropic ground sample distance estimate).
    """
    gcps = list(gcps if gcps is not None else stack.gcps)
    if len(gcps) < 3:
        raise InsufficientGcps(f"need >= 3 ground control points, got {len(gcps)}")
    pixels = np.array([g.pixel for g in gcps], dtype=np.float64)
    world = np.array([g.world for g in gcps], dtype=np.float64)

    centered = pixels - pixels.mean(axis=0)
    cross = centered[:, 0][:, None] * centered[:, 1][None, :]
    area = np.abs(cross - cross.T).max()
    scale = max(np.abs(centered).max(), 1.0)
    if area <= 1e-9 * scale * scale:
        raise CollinearGcps("ground control points are collinear")

    design = np.column_stack([pixels, np.ones(len(gcps))])
    coeffs, *_ = np.linalg.lstsq(design, world, rcond=None)
    transform = coeffs.T  # (2, 3)

    singular = np.linalg.svd(transform[:, :2], compute_uv=False)
    geo = Georeference(
        gsd=float(singular.mean()),
        transform=transform,
        residuals=[],
    )
    predicted = geo.pixel_to_world(pixels)
    geo.residuals = [
        (g.name, float(np.hypot(*(p - w)))) for g, p, w in zip(gcps, predicted, world)
    ]
    stack.gsd = geo.gsd
    return geo


@dataclass
class ArrivalTimeMap:
    """Per-pixel first time (s, relative to stack start) at/above the threshold.

    Pixels that never ignite are NaN; never() exposes them as a mask.
    """

    seconds: np.ndarray
    threshold_c: float

    def never(self) -> np.ndarray:
        return np.isnan(self.seconds)


def arrival_time_map(stack: NadirStack, ignition_threshold: float) -> ArrivalTimeMap:
    cube = stack.values()
    hot = cube >= ignition_threshold
    ever = hot.any(axis=0)
    first = hot.argmax(axis=0)
    seconds = stack.relative_seconds()[first]
    seconds = np.where(ever, seconds, np.nan)
    return ArrivalTimeMap(seconds=seconds, threshold_c=ignition_threshold)


def rate_of_spread(atm: ArrivalTimeMap, gsd: float) -> np.ndarray:
    """Front speed (m/s) from central differences of arrival time.

    speed = gsd / |grad t|. Masked (NaN) at borders, wherever a neighbor never
    ignited, and where the gradient magnitude falls below the flat-front
    epsilon (instantaneous/undefined).
    """
    t = atm.seconds
    dt_dx = np.full_like(t, np.nan)
    dt_dy = np.full_like(t, np.nan)
    dt_dx[:, 1:-1] = (t[:, 2:] - t[:, :-2]) / 2.0
    dt_dy[1:-1, :] = (t[2:, :] - t[:-2, :]) / 2.0
    grad = np.hypot(dt_dx, dt_dy)   # NaN wherever any neighbor is NaN
    with np.errstate(invalid="ignore", divide="ignore"):
        speed = np.where(grad >= GRADIENT_EPSILON_S_PER_PX, gsd / grad, np.nan)
    return speed


def energy_proxy(stack: NadirStack, ambient: float) -> np.ndarray:
    """Trapezoidal time integral of max(T - ambient, 0) per pixel, degC*s."""
    cube = np.clip(stack.values() - ambient, 0.0, None)
    if len(stack.frames) == 1:
        return np.zeros(stack.shape)
    return np.trapezoid(cube, x=stack.relative_seconds(), axis=0)


def read_gcps_csv(path: str | Path) -> list[GroundControlPoint]:
    """Load GCPs from CSV: name,pixel_x,pixel_y,easting_m,northing_m."""
    gcps = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            gcps.append(
                GroundControlPoint(
                    name=rec["name"],
                    pixel=(float(rec["pixel_x"]), float(rec["pixel_y"])),
                    world=(float(rec["easting_m"]), float(rec["northing_m"])),
                )
            )
    return gcps


def write_gcps_csv(gcps: list[GroundControlPoint], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["name", "pixel_x", "pixel_y", "easting_m", "northing_m"])
        for g in gcps:
            writer.writerow(
                [g.name, f"{g.pixel[0]:.3f}", f"{g.pixel[1]:.3f}",
                 f"{g.world[0]:.3f}", f"{g.world[1]:.3f}"]
            )


def export_products(
    stack: NadirStack,
    geo: Georeference,
    out_dir: str | Path,
    ignition_threshold: float = DEFAULT_IGNITION_THRESHOLD_C,
    ambient: float = 20.0,
) -> dict[str, Path]:
    """Write arrival/ROS/energy rasters as float TIFFs plus a text sidecar."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    atm = arrival_time_map(stack, ignition_threshold)
    ros = rate_of_spread(atm, geo.gsd)
    energy = energy_proxy(stack, ambient)

    paths = {
        "arrival": out_dir / "arrival_s.tiff",
        "ros": out_dir / "ros_m_per_s.tiff",
        "energy": out_dir / "energy_degc_s.tiff",
        "sidecar": out_dir / "sidecar.txt",
    }
    write_array_tiff(paths["arrival"], atm.seconds.astype(np.float32))
    write_array_tiff(paths["ros"], ros.astype(np.float32))
    write_array_tiff(paths["energy"], energy.astype(np.float32))

    a, b, c = geo.transform[0]
    d, e, f = geo.transform[1]
    lines = [
        f"plot_id = {stack.plot_id}",
        f"frames = {len(stack.frames)}",
        f"start = {stack.frames[0].timestamp.isoformat(timespec='milliseconds')}",
        f"duration_s = {stack.duration_s:.3f}",
        f"nominal_interval_s = {stack.nominal_interval_s:.3f}",
        f"gsd_m_per_px = {geo.gsd:.6f}",
        f"transform = {a:.9g} {b:.9g} {c:.9g} {d:.9g} {e:.9g} {f:.9g}",
        f"ignition_threshold_c = {ignition_threshold:.2f}",
        f"ambient_c = {ambient:.2f}",
        f"gaps = {len(stack.gaps)}",
    ]
    for gap in stack.gaps:
        lines.append(
            f"gap = {gap.start.isoformat(timespec='milliseconds')}"
            f" -> {gap.end.isoformat(timespec='milliseconds')} ({gap.seconds:.1f} s)"
        )
    for name, residual in geo.residuals:
        lines.append(f"gcp_residual_m[{name}] = {residual:.6f}")
    paths["sidecar"].write_text("\n".join(lines) + "\n")
    return paths
