"""Acceptance suite: one test per release criterion, at pinned tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS line per
criterion. Tolerances here are contractual; do not loosen them.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from emberkit.align import AlignmentParams, estimate_alignment
from emberkit.cli import EXIT_OK, main
from emberkit.labeling import (
    Label,
    ThresholdConfig,
    auto_label,
    hysteresis_mask,
    otsu_threshold,
)
from emberkit.nadir import arrival_time_map, assemble_stack, georeference, rate_of_spread
from emberkit.pairing import pair_assets
from emberkit.raster import TemperatureRaster
from emberkit.rjpeg import decode_rjpeg, encode_reference_rjpeg
from emberkit.tiffio import read_tiff, write_tiff

from test_labeling import blob_raster, flood_fill_oracle, otsu_oracle
from test_nadir import advancing_front, frames_at, square_gcps
from test_pairing import as_index_set, brute_force_pairs, ir_at, rgb_at

GOLDEN = Path(__file__).parent / "golden"


def ok(message: str) -> None:
    print(f"\nACCEPTANCE PASS: {message}")


def test_codec_round_trip_1000_rasters(thermal_meta, tmp_path):
    rng = np.random.default_rng(1)
    started = time.monotonic()
    worst = 0.0
    tiff_path = tmp_path / "check.tiff"
    for i in range(1000):
        if i % 2:
            w, h = int(rng.integers(1, 641)), int(rng.integers(1, 513))
        else:
            w, h = int(rng.integers(1, 161)), int(rng.integers(1, 129))
        values = rng.uniform(-20.0, 600.0, size=(h, w))
        raster = TemperatureRaster(values)
        decoded, _ = decode_rjpeg(encode_reference_rjpeg(raster, thermal_meta))
        worst = max(worst, float(np.abs(decoded.values - values).max()))

        persisted = TemperatureRaster(values.astype(np.float32))
        write_tiff(persisted, tiff_path)
        assert (read_tiff(tiff_path).values == persisted.values).all(), "TIFF not bit-exact"
    elapsed = time.monotonic() - started
    assert worst <= 0.05, f"round-trip error {worst} exceeds 0.05 degC"
    assert elapsed < 10.0, f"codec criterion took {elapsed:.1f} s (budget 10 s)"
    ok(
        f"codec round-trip: 1000 rasters, max abs error {worst:.6f} <= 0.05 degC, "
        f"TIFF bit-exact, {elapsed:.1f} s < 10 s"
    )


def test_threshold_labeling_oracle_1000_rasters():
    rng = np.random.default_rng(2)
    cfg = ThresholdConfig(no_fire_max=80.0, fire_min=200.0)
    agreements = 0
    n = 1000
    for i in range(n):
        if i % 25 == 0:
            max_temp = [80.0, 200.0][(i // 25) % 2]   # exact boundaries
        else:
            max_temp = float(rng.uniform(-20.0, 600.0))
        h, w = int(rng.integers(1, 12)), int(rng.integers(1, 12))
        values = rng.uniform(-20.0, min(max_temp, 50.0), size=(h, w))
        values[rng.integers(0, h), rng.integers(0, w)] = max_temp
        label = auto_label(TemperatureRaster(values), cfg).label
        # direct evaluation of the frame rule on the known maximum
        expected = (
            Label.NO_FIRE if max_temp < 80.0
            else Label.FIRE if max_temp > 200.0
            else Label.NEEDS_REVIEW
        )
        agreements += label == expected
    assert agreements == n, f"auto_label disagreed on {n - agreements}/{n} rasters"
    ok(f"threshold labeling: {agreements}/{n} agreement with the 80/200 rule")


def test_otsu_matches_exhaustive_search_exactly():
    rng = np.random.default_rng(3)
    for i in range(100):
        h, w = int(rng.integers(2, 28)), int(rng.integers(2, 28))
        if i % 2:
            raster = TemperatureRaster(rng.uniform(0, 400, size=(h, w)))
        else:
            levels = rng.uniform(0, 400, size=int(rng.integers(2, 6)))
            raster = TemperatureRaster(rng.choice(levels, size=(h, w)))
        if raster.min_temp == raster.max_temp:
            continue
        assert otsu_threshold(raster) == otsu_oracle(raster), "otsu != exhaustive search"
    ok("otsu: 100 rasters equal exhaustive 255-candidate search exactly")


def test_hysteresis_matches_flood_fill_exactly():
    rng = np.random.default_rng(4)
    for _ in range(100):
        raster = blob_raster(rng, h=20, w=26, n_blobs=int(rng.integers(1, 5)))
        low = float(rng.uniform(25, 150))
        high = float(rng.uniform(low, 450))
        ours = hysteresis_mask(raster, low, high)
        oracle = flood_fill_oracle(raster.values, low, high)
        assert (ours == oracle).all(), "hysteresis mask != BFS flood fill"
    ok("hysteresis: 100 blob rasters pixel-exact vs independent flood fill")


def test_pairing_matches_brute_force_assignment():
    rng = np.random.default_rng(5)
    tol = 2.0
    for _ in range(200):
        n = int(rng.integers(1, 7))
        base = np.cumsum(rng.uniform(2 * tol + 0.05, 30.0, size=n))
        rgbs = [rgb_at(float(t)) for t in base]
        thermals = [
            ir_at(float(t + rng.uniform(-tol / 2, tol / 2)))
            for t in base if rng.random() < 0.85
        ]
        pairs, unmatched = pair_assets(rgbs + thermals, tol)
        assert as_index_set(pairs, rgbs, thermals) == brute_force_pairs(rgbs, thermals, tol)
        used = [p.rgb.rel for p in pairs] + [p.thermal.rel for p in pairs]
        assert len(used) == len(set(used))
        assert 2 * len(pairs) + len(unmatched) == len(rgbs) + len(thermals)
        assert all(abs(p.delta_t) <= tol for p in pairs)
    # injectivity/conservation on unconstrained (possibly ambiguous) sets
    for _ in range(200):
        rgbs = [rgb_at(float(t), f"r{i}.jpg") for i, t in
                enumerate(rng.uniform(0, 60, size=int(rng.integers(0, 8))))]
        thermals = [ir_at(float(t), f"t{i}.jpg") for i, t in
                    enumerate(rng.uniform(0, 60, size=int(rng.integers(0, 8))))]
        pairs, unmatched = pair_assets(rgbs + thermals, tol)
        used = [p.rgb.rel for p in pairs] + [p.thermal.rel for p in pairs]
        assert len(used) == len(set(used))
        assert 2 * len(pairs) + len(unmatched) == len(rgbs) + len(thermals)
    ok("pairing: 200 spaced sets equal brute-force optimum; invariants on 200 more")


def test_alignment_recovery():
    rng = np.random.default_rng(6)
    truth = AlignmentParams(scale_x=0.16, scale_y=0.17067, translate_x=12.5, translate_y=-8.25)
    pts = rng.uniform(0, 4000, size=(40, 2))
    exact = estimate_alignment(
        [(tuple(p), tuple(q)) for p, q in zip(pts, truth.forward(pts))]
    ).params
    for got, want in [
        (exact.scale_x, truth.scale_x), (exact.scale_y, truth.scale_y),
        (exact.translate_x, truth.translate_x), (exact.translate_y, truth.translate_y),
    ]:
        assert abs(got - want) <= 1e-9, f"noiseless recovery off by {abs(got - want)}"

    trial_means = []
    for _ in range(100):
        pts = rng.uniform(0, 4000, size=(20, 2))
        noisy = truth.forward(pts) + rng.normal(0.0, 1.0, size=pts.shape)
        est = estimate_alignment([(tuple(p), tuple(q)) for p, q in zip(pts, noisy)]).params
        induced = np.hypot(*(est.forward(pts) - truth.forward(pts)).T)
        trial_means.append(float(induced.mean()))
    assert max(trial_means) <= 2.0, f"worst trial mean residual {max(trial_means):.3f} px > 2 px"
    ok(
        "alignment: noiseless exact to 1e-9; with sigma=1 px noise worst trial mean "
        f"residual {max(trial_means):.3f} px <= 2 px over 100 trials"
    )


def test_nadir_ros_and_threshold_monotonicity():
    stack = assemble_stack(frames_at(advancing_front(n_frames=14, h=10, w=14)))
    georef = georeference(stack, square_gcps(gsd=0.05))
    assert georef.gsd == pytest.approx(0.05, abs=1e-12)
    atm = arrival_time_map(stack, 200.0)
    speed = rate_of_spread(atm, gsd=georef.gsd)
    interior = speed[1:-1, 1:-1]
    assert np.isfinite(interior).all()
    worst_rel = float(np.abs(interior - 0.01).max() / 0.01)
    assert worst_rel <= 0.01, f"interior ROS off by {worst_rel:.2%} (budget 1%)"

    rng = np.random.default_rng(7)
    frames = frames_at([rng.uniform(0, 500, (8, 9)) for _ in range(10)])
    random_stack = assemble_stack(frames)
    previous = None
    for threshold in (100.0, 200.0, 300.0, 400.0):
        arrivals = arrival_time_map(random_stack, threshold).seconds
        filled = np.where(np.isnan(arrivals), np.inf, arrivals)
        if previous is not None:
            assert (filled >= previous).all(), "arrival times decreased as threshold rose"
        previous = filled
    ok(
        f"nadir: constant front ROS within {worst_rel:.3%} of 0.01 m/s; "
        "arrival maps monotone in threshold"
    )


def test_golden_pipeline_byte_for_byte(tmp_path):
    assert main(["fixtures", "--out", str(tmp_path)]) == EXIT_OK
    out = tmp_path / "out"
    argv_sets = [
        ["sort", "--input", str(tmp_path / "raw"), "--workspace", str(out)],
        ["label", "--workspace", str(out)],
        ["export", "--workspace", str(out)],
    ]
    for argv in argv_sets:
        assert main(argv) == EXIT_OK

    listing = "\n".join(
        sorted(str(p.relative_to(out)) for p in out.rglob("*") if p.is_file())
    ) + "\n"
    assert listing == (GOLDEN / "listing.txt").read_text(), "directory listing diverged"
    for produced, golden in [
        (out / "pairs.csv", GOLDEN / "pairs.csv"),
        (out / "labels.csv", GOLDEN / "labels.csv"),
        (out / "export" / "dataset.csv", GOLDEN / "dataset.csv"),
    ]:
        assert produced.read_bytes() == golden.read_bytes(), f"{golden.name} diverged"

    before = {p: p.read_bytes() for p in out.rglob("*") if p.is_file()}
    for argv in argv_sets:
        assert main(argv) == EXIT_OK
    after = {p: p.read_bytes() for p in out.rglob("*") if p.is_file()}
    assert before == after, "rerun was not a no-op"
    ok("golden pipeline: listing + manifests byte-identical to committed golden; rerun no-op")
