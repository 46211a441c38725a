"""Command-line pipeline: sort raw collections, label, align, stack, export, serve.

Subcommands mirror the processing chain: ``fixtures`` writes a synthetic raw
tree, ``sort`` turns a raw folder into a workspace (pair, decode, regenerate,
FOV-correct, copy), ``label`` batch-labels and sorts pairs into label folders,
``export`` emits the ML dataset, ``stack`` builds nadir-plot products,
``align`` estimates FOV parameters from clicked correspondences, and ``serve``
runs the human review service.

Exit codes: 0 ok, 1 total failure, 2 bad config, 3 partial failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import shutil
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from . import __version__
from .align import (
    AlignmentParams,
    apply_alignment,
    derive_default_params,
    estimate_alignment,
    load_profiles,
)
from .colormap import JPEG_QUALITY, NormalizationMode, inferno, render_thermal_jpeg
from .errors import EmberkitError
from .exifio import copy_exif_bytes
from .fixtures import generate_fixture_tree
from .labeling import (
    Label,
    LabelSource,
    ThresholdConfig,
    auto_label,
    export_ml_dataset,
    records_equivalent,
    sort_pairs,
)
from .nadir import build_stack, export_products, georeference, read_gcps_csv
from .pairing import (
    DEFAULT_TOLERANCE_S,
    MediaKind,
    pair_assets,
    pairs_csv_text,
    scan_directory,
)
from .rjpeg import decode_rjpeg
from .tiffio import array_tiff_bytes
from .util import atomic_write_text
from .workspace import Workspace

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_BAD_CONFIG = 2
EXIT_PARTIAL = 3


@dataclass
class Config:
    tolerance: float = DEFAULT_TOLERANCE_S
    no_fire_max: float = 80.0
    fire_min: float = 200.0
    norm_lo: float = 0.0
    norm_hi: float = 400.0
    port: int = 8476
    jobs: int = 1
    profile: str = ""

    _FLOATS = ("tolerance", "no_fire_max", "fire_min", "norm_lo", "norm_hi")
    _INTS = ("port", "jobs")

    @classmethod
    def resolve(cls, args: argparse.Namespace) -> "Config":
        """flags > config file > defaults."""
        cfg = cls()
        config_path = getattr(args, "config", None)
        if config_path:
            parser = configparser.ConfigParser()
            with open(config_path) as fh:
                parser.read_file(fh)
            sec = parser["emberkit"] if parser.has_section("emberkit") else parser["DEFAULT"]
            for name in cls._FLOATS:
                if name in sec:
                    setattr(cfg, name, sec.getfloat(name))
            for name in cls._INTS:
                if name in sec:
                    setattr(cfg, name, sec.getint(name))
            if "profile" in sec:
                cfg.profile = sec["profile"]
        for name in (*cls._FLOATS, *cls._INTS, "profile"):
            value = getattr(args, name, None)
            if value is not None:
                setattr(cfg, name, value)
        return cfg

    def thresholds(self) -> ThresholdConfig:
        return ThresholdConfig(no_fire_max=self.no_fire_max, fire_min=self.fire_min)


def _write_if_changed(path: Path, data: bytes) -> bool:
    if path.exists() and path.read_bytes() == data:
        return False
    path.write_bytes(data)
    return True


def _align_params_for(pair, raster, profiles, cfg: Config) -> AlignmentParams:
    if cfg.profile:
        return profiles[cfg.profile].default_params
    model = pair.rgb.meta.camera_model
    if model in profiles:
        return profiles[model].default_params
    rgb_dims = (pair.rgb.meta.image_width, pair.rgb.meta.image_height)
    if min(rgb_dims) <= 0:
        return AlignmentParams()
    return derive_default_params(rgb_dims, (raster.width, raster.height))


def _process_image_pair(pair, ws: Workspace, profiles, cfg: Config) -> int:
    """Decode, persist TIFF, regenerate thermal JPEG, FOV-correct RGB. Returns changes."""
    changes = 0
    raster, _ = decode_rjpeg(pair.thermal.path.read_bytes())

    if _write_if_changed(ws.tiff_path(pair.pair_id), array_tiff_bytes(raster.values)):
        changes += 1

    raw_thermal = pair.thermal.path.read_bytes()
    thermal_jpeg = copy_exif_bytes(
        raw_thermal, render_thermal_jpeg(raster, inferno(), NormalizationMode.minmax())
    )
    if _write_if_changed(ws.thermal_jpeg_path(pair.pair_id), thermal_jpeg):
        changes += 1

    raw_rgb = pair.rgb.path.read_bytes()
    rgb = np.asarray(Image.open(io.BytesIO(raw_rgb)).convert("RGB"))
    params = _align_params_for(pair, raster, profiles, cfg)
    aligned, _ = apply_alignment(rgb, params, target=(raster.width, raster.height))
    buf = io.BytesIO()
    Image.fromarray(aligned, "RGB").save(buf, format="JPEG", quality=JPEG_QUALITY)
    if _write_if_changed(ws.aligned_rgb_path(pair.pair_id), copy_exif_bytes(raw_rgb, buf.getvalue())):
        changes += 1
    return changes


def cmd_sort(args: argparse.Namespace) -> int:
    cfg = Config.resolve(args)
    input_root = Path(args.input)
    if not input_root.is_dir():
        print(f"error: input root {input_root} is not a directory", file=sys.stderr)
        return EXIT_BAD_CONFIG
    ws = Workspace(args.workspace)

    scan = scan_directory(input_root)
    for skip in scan.skips:
        print(f"skip: {skip.rel}: {skip.reason}")
    if not scan.assets:
        ws.root.mkdir(parents=True, exist_ok=True)
        atomic_write_text(ws.pairs_csv, pairs_csv_text([]))
        print("warning: no media found; wrote empty manifest")
        return EXIT_OK

    pairs, unmatched = pair_assets(scan.assets, cfg.tolerance)
    for asset in unmatched:
        print(f"unmatched: {asset.rel}")
    if args.dry_run:
        print(f"plan: {len(pairs)} pairs -> {ws.root} (dry run, nothing written)")
        return EXIT_OK

    ws.create_dirs()
    profiles = load_profiles(args.profiles_file) if args.profiles_file else load_profiles()
    image_pairs = [p for p in pairs if p.rgb.kind == MediaKind.IMAGE]
    video_pairs = [p for p in pairs if p.rgb.kind == MediaKind.VIDEO]

    failures: list[tuple[str, str, str]] = []   # (pair_id, error type, message)
    changes = 0

    def run_one(pair):
        return pair, _process_image_pair(pair, ws, profiles, cfg)

    with ThreadPoolExecutor(max_workers=max(cfg.jobs, 1)) as pool:
        for pair, future in [(p, pool.submit(run_one, p)) for p in image_pairs]:
            try:
                _, n = future.result()
                changes += n
            except (EmberkitError, OSError) as exc:
                failures.append((pair.pair_id, type(exc).__name__, str(exc)))

    if video_pairs:
        ws.video_dir.mkdir(parents=True, exist_ok=True)
        for pair in video_pairs:
            for asset, suffix in ((pair.rgb, "_rgb.mp4"), (pair.thermal, "_ir.mp4")):
                dest = ws.video_dir / f"{pair.pair_id}{suffix}"
                if not dest.exists() or dest.read_bytes() != asset.path.read_bytes():
                    shutil.copyfile(asset.path, dest)
                    changes += 1

    failed_ids = {pid for pid, _, _ in failures}
    manifest_pairs = [p for p in pairs if p.pair_id not in failed_ids]
    atomic_write_text(ws.pairs_csv, pairs_csv_text(manifest_pairs))

    for pair_id, name, message in failures:
        print(f"failure: {pair_id}: {name}: {message}", file=sys.stderr)
    print(
        f"sorted {len(image_pairs) - len(failures)} image pairs, {len(video_pairs)} video pairs, "
        f"{len(unmatched)} unmatched, {len(scan.skips)} skipped, {changes} files changed"
    )
    if failures and len(failures) == len(image_pairs):
        return EXIT_FAILURE
    if failures:
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_label(args: argparse.Namespace) -> int:
    cfg = Config.resolve(args)
    ws = Workspace(args.workspace).require()
    rows = ws.image_pairs()
    store = ws.label_store()
    records = store.load()

    planned = 0
    for row in rows:
        existing = records.get(row.pair_id)
        if existing is not None and existing.source == LabelSource.HUMAN:
            continue
        record = auto_label(
            ws.raster(row.pair_id), cfg.thresholds(),
            pair_id=row.pair_id, decided_at=row.timestamp,
        )
        if not records_equivalent(existing, record):
            planned += 1
        records[row.pair_id] = record

    counts = {label: 0 for label in Label}
    for row in rows:
        counts[records[row.pair_id].label] += 1
    summary = ", ".join(f"{label.value}={counts[label]}" for label in Label)

    if args.dry_run:
        print(f"plan: {planned} label changes; {summary} (dry run, nothing written)")
        return EXIT_OK

    store.save(records)
    report = sort_pairs([ws.pair_files(r) for r in rows], records, ws.root)
    print(f"labeled {len(rows)} pairs ({planned} changed): {summary}; "
          f"{report.copied} files copied, {report.removed} removed")
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    cfg = Config.resolve(args)
    ws = Workspace(args.workspace).require()
    rows = ws.image_pairs()
    records = ws.label_store().load()
    out_root = Path(args.out) if args.out else ws.export_dir
    mode = (
        NormalizationMode.minmax()
        if args.normalization == "minmax"
        else NormalizationMode.fixed(cfg.norm_lo, cfg.norm_hi)
    )
    exportable = [
        r for r in rows
        if r.pair_id in records and records[r.pair_id].label in (Label.FIRE, Label.NO_FIRE)
    ]
    if args.dry_run:
        print(f"plan: export {len(exportable)} pairs -> {out_root} (dry run, nothing written)")
        return EXIT_OK
    manifest = export_ml_dataset([ws.pair_files(r) for r in rows], records, mode, out_root)
    print(f"exported {len(manifest)} pairs -> {out_root}")
    return EXIT_OK


def cmd_align(args: argparse.Namespace) -> int:
    cfg = Config.resolve(args)
    ws = Workspace(args.workspace).require()
    points = []
    with open(args.correspondences, newline="") as fh:
        for rec in csv.DictReader(fh):
            points.append(
                (
                    (float(rec["rgb_x"]), float(rec["rgb_y"])),
                    (float(rec["ir_x"]), float(rec["ir_y"])),
                )
            )
    estimate = estimate_alignment(points)
    p = estimate.params
    print(
        f"estimated: scale=({p.scale_x:.6f}, {p.scale_y:.6f}) "
        f"translate=({p.translate_x:.3f}, {p.translate_y:.3f}) "
        f"residual mean={estimate.residuals.mean:.3f}px max={estimate.residuals.max:.3f}px"
    )
    if args.dry_run:
        print("plan: write alignment/params.txt and error_map.csv (dry run, nothing written)")
        return EXIT_OK
    out_dir = ws.root / "alignment"
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "params.txt").write_text(
        f"scale_x = {p.scale_x:.9g}\nscale_y = {p.scale_y:.9g}\n"
        f"translate_x = {p.translate_x:.9g}\ntranslate_y = {p.translate_y:.9g}\n"
    )
    (out_dir / "error_map.csv").write_text(estimate.residuals.to_csv())

    if args.apply:
        raw_root = Path(args.input)
        scan = scan_directory(raw_root)
        pairs, _ = pair_assets(scan.assets, cfg.tolerance)
        for pair in pairs:
            if pair.rgb.kind != MediaKind.IMAGE:
                continue
            raster = ws.raster(pair.pair_id)
            raw_rgb = pair.rgb.path.read_bytes()
            rgb = np.asarray(Image.open(io.BytesIO(raw_rgb)).convert("RGB"))
            aligned, _ = apply_alignment(rgb, p, target=(raster.width, raster.height))
            buf = io.BytesIO()
            Image.fromarray(aligned, "RGB").save(buf, format="JPEG", quality=JPEG_QUALITY)
            _write_if_changed(
                ws.aligned_rgb_path(pair.pair_id), copy_exif_bytes(raw_rgb, buf.getvalue())
            )
        print(f"re-aligned {len(pairs)} pairs with estimated parameters")
    return EXIT_OK


def cmd_stack(args: argparse.Namespace) -> int:
    cfg = Config.resolve(args)
    ws = Workspace(args.workspace)
    plot_dir = Path(args.plot_dir)
    if not plot_dir.is_dir():
        print(f"error: plot dir {plot_dir} is not a directory", file=sys.stderr)
        return EXIT_BAD_CONFIG
    gcps_path = Path(args.gcps) if args.gcps else plot_dir / "gcps.csv"
    plot_id = args.plot_id or plot_dir.name

    scan = scan_directory(plot_dir)
    pairs, unmatched = pair_assets(scan.assets, cfg.tolerance)
    if not pairs:
        print("error: no pairs found in plot dir", file=sys.stderr)
        return EXIT_FAILURE
    stack = build_stack(pairs, plot_id=plot_id, nominal_interval_s=args.interval)
    gcps = read_gcps_csv(gcps_path)
    geo = georeference(stack, gcps)
    if args.dry_run:
        print(
            f"plan: {len(stack.frames)} frames, {len(stack.gaps)} gaps, gsd={geo.gsd:.4f} m/px "
            f"-> {ws.nadir_dir / plot_id} (dry run, nothing written)"
        )
        return EXIT_OK
    paths = export_products(
        stack, geo, ws.nadir_dir / plot_id,
        ignition_threshold=args.threshold, ambient=args.ambient,
    )
    print(
        f"stacked {len(stack.frames)} frames ({stack.duration_s:.0f} s, "
        f"{len(stack.gaps)} gaps, {len(unmatched)} unmatched), gsd={geo.gsd:.4f} m/px; "
        f"products in {paths['sidecar'].parent}"
    )
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    cfg = Config.resolve(args)
    Workspace(args.workspace).require()
    ui_dir = Path(args.ui_dir) if args.ui_dir else Path.cwd() / "frontend" / "dist"
    if args.dry_run:
        print(f"plan: serve {args.workspace} on 127.0.0.1:{cfg.port} (dry run)")
        return EXIT_OK
    import uvicorn

    from .service import create_app

    app = create_app(
        args.workspace,
        thresholds=cfg.thresholds(),
        ui_dir=ui_dir if ui_dir.is_dir() else None,
    )
    print(f"review service on http://127.0.0.1:{cfg.port} (workspace {args.workspace})")
    uvicorn.run(app, host="127.0.0.1", port=cfg.port, log_level="warning")
    return EXIT_OK


def cmd_fixtures(args: argparse.Namespace) -> int:
    counts = generate_fixture_tree(
        args.out,
        image_pairs=args.image_pairs,
        video_pairs=args.video_pairs,
        nadir_frames=args.nadir_frames,
        seed=args.seed,
    )
    print(
        f"fixtures: {counts.image_pairs} image pairs, {counts.video_pairs} video pairs, "
        f"{counts.nadir_frames} nadir frames -> {args.out}"
    )
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="INI config file ([emberkit] section)")
    parser.add_argument("--dry-run", action="store_true", help="print the plan, write nothing")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emberkit",
        description="Paired RGB + radiometric thermal UAV fire imagery pipeline",
    )
    parser.add_argument("--version", action="version", version=f"emberkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fixtures", help="generate a synthetic raw collection")
    p.add_argument("--out", required=True)
    p.add_argument("--image-pairs", type=int, default=6)
    p.add_argument("--video-pairs", type=int, default=1)
    p.add_argument("--nadir-frames", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_fixtures)

    p = sub.add_parser("sort", help="pair raw media and build the workspace")
    p.add_argument("--input", required=True, help="raw collection root")
    p.add_argument("--workspace", required=True, help="output workspace root")
    p.add_argument("--tolerance", type=float, default=None, help="pairing window, seconds")
    p.add_argument("--profile", default=None, help="force a camera profile for alignment")
    p.add_argument("--profiles-file", default=None, help="override packaged camera profiles")
    p.add_argument("--jobs", type=int, default=None, help="parallel image workers")
    _add_common(p)
    p.set_defaults(func=cmd_sort)

    p = sub.add_parser("label", help="batch auto-label and sort pairs into label folders")
    p.add_argument("--workspace", required=True)
    p.add_argument("--no-fire-max", type=float, default=None, dest="no_fire_max")
    p.add_argument("--fire-min", type=float, default=None, dest="fire_min")
    _add_common(p)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("export", help="emit the ML dataset for labeled pairs")
    p.add_argument("--workspace", required=True)
    p.add_argument("--out", default=None, help="export root (default workspace/export)")
    p.add_argument("--normalization", choices=["fixed", "minmax"], default="fixed")
    p.add_argument("--norm-lo", type=float, default=None, dest="norm_lo")
    p.add_argument("--norm-hi", type=float, default=None, dest="norm_hi")
    _add_common(p)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("align", help="estimate FOV parameters from correspondences")
    p.add_argument("--workspace", required=True)
    p.add_argument("--correspondences", required=True,
                   help="CSV with rgb_x,rgb_y,ir_x,ir_y columns")
    p.add_argument("--apply", action="store_true", help="re-render aligned RGB with the estimate")
    p.add_argument("--input", default=None, help="raw root (needed with --apply)")
    p.add_argument("--tolerance", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("stack", help="build nadir plot products (arrival, ROS, energy)")
    p.add_argument("--workspace", required=True)
    p.add_argument("--plot-dir", required=True, help="folder of nadir frames")
    p.add_argument("--gcps", default=None, help="GCP csv (default plot-dir/gcps.csv)")
    p.add_argument("--plot-id", default=None)
    p.add_argument("--interval", type=float, default=5.0, help="nominal capture interval, s")
    p.add_argument("--threshold", type=float, default=200.0, help="ignition threshold, degC")
    p.add_argument("--ambient", type=float, default=20.0, help="ambient temperature, degC")
    p.add_argument("--tolerance", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_stack)

    p = sub.add_parser("serve", help="run the human review service")
    p.add_argument("--workspace", required=True)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--no-fire-max", type=float, default=None, dest="no_fire_max")
    p.add_argument("--fire-min", type=float, default=None, dest="fire_min")
    p.add_argument("--ui-dir", default=None, help="built frontend assets (default ./frontend/dist)")
    _add_common(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EmberkitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
