"""Estimate and apply the RGB-to-thermal field-of-view correction.

Recovers scale/translate parameters from point correspondences (in the field
these come from clicking matching features), quantifies residual
misalignment as Euclidean error, and warps a full-resolution RGB frame onto
the thermal grid.
"""

import numpy as np

from emberkit.align import AlignmentParams, alignment_error, apply_alignment, estimate_alignment, load_profiles

rng = np.random.default_rng(11)

# pretend a field tech clicked 12 matching features, with ~1 px click noise
truth = AlignmentParams(scale_x=0.16, scale_y=0.17067, translate_x=12.0, translate_y=-4.5)
rgb_points = rng.uniform(0, 4000, size=(12, 2))
thermal_points = truth.forward(rgb_points) + rng.normal(0, 1.0, size=(12, 2))
correspondences = [(tuple(p), tuple(q)) for p, q in zip(rgb_points, thermal_points)]

estimate = estimate_alignment(correspondences)
p = estimate.params
print(f"true    : scale=({truth.scale_x:.5f}, {truth.scale_y:.5f}) "
      f"translate=({truth.translate_x:+.2f}, {truth.translate_y:+.2f})")
print(f"estimate: scale=({p.scale_x:.5f}, {p.scale_y:.5f}) "
      f"translate=({p.translate_x:+.2f}, {p.translate_y:+.2f})")
print(f"fit residuals: mean {estimate.residuals.mean:.2f} px, max {estimate.residuals.max:.2f} px")

# residual misalignment between expected and observed plate positions
observed = truth.forward(rgb_points)
predicted = p.forward(rgb_points)
error = alignment_error([(tuple(e), tuple(o)) for e, o in zip(observed, predicted)])
print(f"parameter-induced error: mean {error.mean:.3f} px, max {error.max:.3f} px")

# warp a full M30T frame onto the 640x512 thermal grid with profile defaults
profile = load_profiles()["M30T"]
rgb = rng.integers(0, 256, size=(3000, 4000, 3), dtype=np.uint8)
aligned, out_of_bounds = apply_alignment(rgb, profile.default_params, profile.ir_resolution)
print(f"warped {rgb.shape[1]}x{rgb.shape[0]} RGB -> {aligned.shape[1]}x{aligned.shape[0]} "
      f"({int(out_of_bounds.sum())} out-of-crop pixels)")
