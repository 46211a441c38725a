"""Directory scanning and timestamp pairing, with a brute-force assignment oracle."""

import itertools
from datetime import timedelta
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emberkit import exifio, mp4meta
from emberkit.errors import IoFailure
from emberkit.pairing import (
    MediaAsset,
    MediaKind,
    make_pair_id,
    pair_assets,
    pairs_csv_text,
    read_pairs_csv,
    scan_directory,
    write_pairs_csv,
)
from emberkit.raster import CaptureMetadata, Modality, TemperatureRaster
from emberkit.rjpeg import encode_reference_rjpeg

from conftest import BASE_TIME
from test_exifio import fresh_jpeg


def asset(modality, t_offset_s, rel, kind=MediaKind.IMAGE):
    meta = CaptureMetadata(
        timestamp=BASE_TIME + timedelta(seconds=t_offset_s),
        camera_model="REF640",
        modality=modality,
    )
    return MediaAsset(path=Path("/nonexistent") / rel, rel=rel, kind=kind, modality=modality, meta=meta)


def rgb_at(t, name=None):
    return asset(Modality.RGB, t, name or f"rgb_{t:.3f}.jpg")


def ir_at(t, name=None):
    return asset(Modality.THERMAL, t, name or f"ir_{t:.3f}.jpg")


def brute_force_pairs(rgbs, thermals, tolerance):
    """Exhaustive best one-to-one matching: max matches, then min total |dt|."""
    best_key, best_set = None, set()
    slots = list(range(len(thermals))) + [None] * len(rgbs)
    for perm in set(itertools.permutations(slots, len(rgbs))):
        matched = []
        for i, j in enumerate(perm):
            if j is None:
                continue
            dt = (rgbs[i].meta.timestamp - thermals[j].meta.timestamp).total_seconds()
            if abs(dt) <= tolerance:
                matched.append((i, j, abs(dt)))
        key = (-len(matched), sum(m[2] for m in matched))
        if best_key is None or key < best_key:
            best_key = key
            best_set = {(m[0], m[1]) for m in matched}
    return best_set


def as_index_set(pairs, rgbs, thermals):
    rrel = {a.rel: i for i, a in enumerate(rgbs)}
    trel = {a.rel: i for i, a in enumerate(thermals)}
    return {(rrel[p.rgb.rel], trel[p.thermal.rel]) for p in pairs}


class TestPairAssets:
    def test_single_candidate_inside_window(self):
        pairs, unmatched = pair_assets([rgb_at(10.0), ir_at(10.4)], tolerance=2.0)
        assert len(pairs) == 1 and not unmatched
        assert pairs[0].delta_t == pytest.approx(-0.4)

    def test_out_of_window_stays_unmatched(self):
        pairs, unmatched = pair_assets([rgb_at(0.0), ir_at(5.0)], tolerance=2.0)
        assert not pairs
        assert len(unmatched) == 2

    def test_tie_breaks_toward_earlier_thermal(self):
        pairs, _ = pair_assets([rgb_at(10.0), ir_at(9.5, "a.jpg"), ir_at(10.5, "b.jpg")], 2.0)
        assert pairs[0].thermal.rel == "a.jpg"

    def test_kinds_do_not_cross_match(self):
        video = asset(Modality.THERMAL, 10.0, "v.mp4", kind=MediaKind.VIDEO)
        pairs, unmatched = pair_assets([rgb_at(10.0), video], 2.0)
        assert not pairs and len(unmatched) == 2

    def test_empty_input(self):
        assert pair_assets([], 2.0) == ([], [])

    def test_matches_brute_force_on_spaced_shots(self, rng):
        # inter-shot gaps > 2*tolerance, jitter < tolerance/2: unambiguous regime
        tol = 2.0
        for _ in range(30):
            n = int(rng.integers(1, 6))
            base = np.cumsum(rng.uniform(2 * tol + 0.1, 20.0, size=n))
            rgbs = [rgb_at(t) for t in base]
            thermals = [
                ir_at(t + rng.uniform(-tol / 2, tol / 2)) for t in base if rng.random() < 0.8
            ]
            pairs, unmatched = pair_assets(rgbs + thermals, tol)
            assert as_index_set(pairs, rgbs, thermals) == brute_force_pairs(rgbs, thermals, tol)
            assert 2 * len(pairs) + len(unmatched) == len(rgbs) + len(thermals)

    @given(
        rgb_ts=st.lists(st.floats(0, 500, allow_nan=False), max_size=8),
        ir_ts=st.lists(st.floats(0, 500, allow_nan=False), max_size=8),
        tol=st.floats(0.1, 10.0),
    )
    @settings(max_examples=120, deadline=None)
    def test_window_injectivity_conservation(self, rgb_ts, ir_ts, tol):
        rgbs = [rgb_at(t, f"r{i}.jpg") for i, t in enumerate(rgb_ts)]
        thermals = [ir_at(t, f"t{i}.jpg") for i, t in enumerate(ir_ts)]
        pairs, unmatched = pair_assets(rgbs + thermals, tol)
        used = [p.rgb.rel for p in pairs] + [p.thermal.rel for p in pairs]
        assert len(used) == len(set(used))                      # injectivity
        assert all(abs(p.delta_t) <= tol for p in pairs)        # window
        assert 2 * len(pairs) + len(unmatched) == len(rgbs) + len(thermals)

    def test_pair_id_is_path_deterministic(self):
        assert make_pair_id("a/x.jpg", "a/y.jpg") == make_pair_id("a/x.jpg", "a/y.jpg")
        assert make_pair_id("a/x.jpg", "a/y.jpg") != make_pair_id("a/y.jpg", "a/x.jpg")


def build_raw_tree(root: Path, n_pairs=4, start=0.0, spacing=5.0) -> None:
    root.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(7)
    for i in range(n_pairs):
        t = BASE_TIME + timedelta(seconds=start + i * spacing)
        rgb_meta = CaptureMetadata(timestamp=t, camera_model="REF640", modality=Modality.RGB)
        (root / f"P{i:04d}_RGB.jpg").write_bytes(exifio.embed_exif(fresh_jpeg(), rgb_meta))
        ir_meta = CaptureMetadata(
            timestamp=t + timedelta(milliseconds=400),
            camera_model="REF640",
            modality=Modality.THERMAL,
        )
        raster = TemperatureRaster(rng.uniform(10, 320, size=(8, 10)))
        (root / f"P{i:04d}_IR.jpg").write_bytes(encode_reference_rjpeg(raster, ir_meta))


class TestScanDirectory:
    def test_counts_a_clean_tree(self, tmp_path):
        build_raw_tree(tmp_path / "raw")
        result = scan_directory(tmp_path / "raw")
        assert len(result.assets) == 8
        assert not result.skips
        by_modality = {m: sum(a.modality == m for a in result.assets) for m in Modality}
        assert by_modality[Modality.RGB] == 4
        assert by_modality[Modality.THERMAL] == 4

    def test_zero_byte_file_becomes_skip(self, tmp_path):
        build_raw_tree(tmp_path / "raw")
        (tmp_path / "raw" / "P0001_RGB.jpg").write_bytes(b"")
        result = scan_directory(tmp_path / "raw")
        assert len(result.assets) == 7
        assert len(result.skips) == 1
        assert result.skips[0].reason == "empty file"

    def test_scan_is_deterministic(self, tmp_path):
        build_raw_tree(tmp_path / "raw")
        a = scan_directory(tmp_path / "raw")
        b = scan_directory(tmp_path / "raw")
        assert [x.rel for x in a.assets] == [x.rel for x in b.assets]

    def test_modality_from_payload_beats_filename(self, tmp_path):
        # a radiometric container named like an RGB file still scans as thermal
        root = tmp_path / "raw"
        root.mkdir()
        meta = CaptureMetadata(timestamp=BASE_TIME, camera_model="X", modality=Modality.THERMAL)
        raster = TemperatureRaster(np.full((4, 4), 25.0))
        (root / "P0000_RGB.jpg").write_bytes(encode_reference_rjpeg(raster, meta))
        result = scan_directory(root)
        assert result.assets[0].modality == Modality.THERMAL

    def test_videos_pair_by_start_time(self, tmp_path):
        root = tmp_path / "raw"
        root.mkdir()
        (root / "V0000_RGB.mp4").write_bytes(mp4meta.write_minimal_mp4(BASE_TIME))
        (root / "V0000_IR.mp4").write_bytes(
            mp4meta.write_minimal_mp4(BASE_TIME + timedelta(seconds=1))
        )
        result = scan_directory(root)
        assert {a.kind for a in result.assets} == {MediaKind.VIDEO}
        pairs, unmatched = pair_assets(result.assets, 2.0)
        assert len(pairs) == 1 and not unmatched
        assert pairs[0].delta_t == pytest.approx(-1.0)

    def test_missing_root_raises(self, tmp_path):
        with pytest.raises(IoFailure):
            scan_directory(tmp_path / "nope")


class TestPairsCsv:
    def test_round_trip(self, tmp_path):
        pairs, _ = pair_assets([rgb_at(1.0), ir_at(1.2), rgb_at(20.0), ir_at(19.9)], 2.0)
        path = tmp_path / "pairs.csv"
        write_pairs_csv(pairs, path)
        rows = read_pairs_csv(path)
        assert [r.pair_id for r in rows] == [p.pair_id for p in pairs]
        assert rows[0].delta_t == pytest.approx(pairs[0].delta_t, abs=1e-3)
        assert rows[0].timestamp == pairs[0].timestamp

    def test_text_is_stable(self):
        pairs, _ = pair_assets([rgb_at(1.0), ir_at(1.2)], 2.0)
        assert pairs_csv_text(pairs) == pairs_csv_text(pairs)
        assert pairs_csv_text(pairs).startswith(
            "pair_id,rgb_path,thermal_path,delta_t_s,camera_model,timestamp_iso8601\n"
        )
