"""Derive fire-progression products from a nadir (straight-down) image stack.

A synthetic flame front advances one pixel column per 5-second frame across
a georeferenced plot. The stack yields: per-pixel arrival times, rate of
spread from the arrival gradient, and a degree-second energy proxy.
"""

import tempfile
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from emberkit.nadir import (
    GroundControlPoint,
    arrival_time_map,
    assemble_stack,
    energy_proxy,
    export_products,
    georeference,
    rate_of_spread,
)
from emberkit.raster import TemperatureRaster

start = datetime(2023, 2, 5, 18, 20, 0, tzinfo=timezone.utc)
w, h, gsd = 30, 24, 0.05

frames = []
for i in range(w):
    values = np.full((h, w), 20.0)
    values[:, : i + 1] = 380.0
    frames.append((start + timedelta(seconds=5.0 * i), TemperatureRaster(values)))

stack = assemble_stack(frames, plot_id="demo_plot")
print(f"stack: {len(stack.frames)} frames over {stack.duration_s:.0f} s, "
      f"{len(stack.gaps)} gaps")

gcps = [
    GroundControlPoint("CENTER", (w / 2, h / 2), (gsd * w / 2, gsd * h / 2)),
    GroundControlPoint("NORTH", (w / 2, 1.0), (gsd * w / 2, gsd * 1.0)),
    GroundControlPoint("EAST", (w - 1.0, h / 2), (gsd * (w - 1.0), gsd * h / 2)),
    GroundControlPoint("SOUTH", (w / 2, h - 1.0), (gsd * w / 2, gsd * (h - 1.0))),
]
geo = georeference(stack, gcps)
print(f"georeference: gsd {geo.gsd:.4f} m/px, worst GCP residual "
      f"{max(r for _, r in geo.residuals):.2e} m")

atm = arrival_time_map(stack, ignition_threshold=200.0)
print(f"arrival times: 0 s at the ignition edge, {np.nanmax(atm.seconds):.0f} s at the far edge")

speed = rate_of_spread(atm, geo.gsd)
interior = speed[1:-1, 1:-1]
print(f"rate of spread: interior mean {np.nanmean(interior):.4f} m/s "
      f"(front moves {gsd:.2f} m every 5 s)")

energy = energy_proxy(stack, ambient=20.0)
print(f"energy proxy: first column {energy[0, 0]:.0f} degC*s, "
      f"last column {energy[0, -1]:.0f} degC*s")

out = Path(tempfile.mkdtemp(prefix="emberkit_demo_")) / "demo_plot"
paths = export_products(stack, geo, out)
print(f"products written: {sorted(p.name for p in out.iterdir())}")
