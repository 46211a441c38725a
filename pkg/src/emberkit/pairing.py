"""Raw media discovery and RGB-thermal pairing by capture timestamp.

scan_directory inventories every JPEG/MP4 under a root, classifying modality
from container contents (radiometric payload present => thermal) with filename
tokens as fallback. pair_assets then matches RGB to thermal one-to-one by
nearest timestamp inside a tolerance window; capture runs space shots farther
apart than the tolerance, so greedy nearest matching is the optimal assignment
in practice (and tested against the brute-force optimum).
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from pathlib import Path

from . import exifio, jpegio, mp4meta, rjpeg
from .errors import IoFailure, NotAJpeg
from .raster import CaptureMetadata, Modality

DEFAULT_TOLERANCE_S = 2.0

_IMAGE_SUFFIXES = {".jpg", ".jpeg"}
_VIDEO_SUFFIXES = {".mp4"}

_THERMAL_TOKENS = {"ir", "t", "thermal", "therm", "tir"}
_RGB_TOKENS = {"rgb", "w", "v", "vis", "wide", "visual", "zoom"}


class MediaKind(Enum):
    IMAGE = "IMAGE"
    VIDEO = "VIDEO"


@dataclass
class MediaAsset:
    path: Path                # absolute location on disk
    rel: str                  # posix path relative to the scan root (stable id basis)
    kind: MediaKind
    modality: Modality
    meta: CaptureMetadata


@dataclass
class SkipReport:
    rel: str
    reason: str


@dataclass
class ScanResult:
    assets: list[MediaAsset]
    skips: list[SkipReport]


@dataclass
class PairRecord:
    pair_id: str
    rgb: MediaAsset
    thermal: MediaAsset
    delta_t: float            # seconds, rgb minus thermal

    @property
    def timestamp(self) -> datetime:
        return self.thermal.meta.timestamp

    @property
    def camera_model(self) -> str:
        return self.thermal.meta.camera_model


def make_pair_id(rgb_rel: str, thermal_rel: str) -> str:
    """Deterministic id for a pair of scan-relative paths."""
    return hashlib.sha256(f"{rgb_rel}|{thermal_rel}".encode()).hexdigest()[:12]


def _modality_from_name(stem: str, default: Modality) -> Modality:
    tokens = {t for t in "".join(c if c.isalnum() else " " for c in stem.lower()).split()}
    if tokens & _THERMAL_TOKENS:
        return Modality.THERMAL
    if tokens & _RGB_TOKENS:
        return Modality.RGB
    return default


def _classify_image(data: bytes, stem: str) -> tuple[Modality, CaptureMetadata]:
    tags = exifio.parse_exif_tags(data)
    if tags is None:
        raise ValueError("no capture metadata block")
    if rjpeg.has_radiometric_payload(data):
        modality = Modality.THERMAL
    else:
        modality = _modality_from_name(stem, Modality.RGB)
    dims = jpegio.jpeg_dimensions(data) or (0, 0)
    return modality, exifio.metadata_from_tags(tags, dims[0], dims[1], modality)


def _classify_video(data: bytes, stem: str) -> tuple[Modality, CaptureMetadata]:
    timestamp = mp4meta.read_creation_time(data)
    modality = _modality_from_name(stem, Modality.RGB)
    return modality, CaptureMetadata(timestamp=timestamp, modality=modality)


def scan_directory(root: str | Path) -> ScanResult:
    """Inventory all JPEG/MP4 files under root (recursive, lexicographic order).

    Per-file problems become SkipReports and never abort the scan; only an
    unreadable root raises IoFailure.
    """
    root = Path(root)
    if not root.is_dir():
        raise IoFailure(f"scan root is not a readable directory: {root}")

    candidates = [
        p for p in root.rglob("*")
        if p.is_file() and p.suffix.lower() in (_IMAGE_SUFFIXES | _VIDEO_SUFFIXES)
    ]
    candidates.sort(key=lambda p: p.relative_to(root).as_posix())

    assets: list[MediaAsset] = []
    skips: list[SkipReport] = []
    for path in candidates:
        rel = path.relative_to(root).as_posix()
        try:
            data = path.read_bytes()
        except OSError as exc:
            skips.append(SkipReport(rel, f"unreadable: {exc}"))
            continue
        if not data:
            skips.append(SkipReport(rel, "empty file"))
            continue
        try:
            if path.suffix.lower() in _IMAGE_SUFFIXES:
                modality, meta = _classify_image(data, path.stem)
                kind = MediaKind.IMAGE
            else:
                modality, meta = _classify_video(data, path.stem)
                kind = MediaKind.VIDEO
        except (NotAJpeg, ValueError) as exc:
            skips.append(SkipReport(rel, str(exc)))
            continue
        assets.append(MediaAsset(path=path, rel=rel, kind=kind, modality=modality, meta=meta))
    return ScanResult(assets=assets, skips=skips)


def _match_kind(
    rgbs: list[MediaAsset], thermals: list[MediaAsset], tolerance: float
) -> tuple[list[PairRecord], list[MediaAsset]]:
    rgbs = sorted(rgbs, key=lambda a: (a.meta.timestamp, a.rel))
    thermals = sorted(thermals, key=lambda a: (a.meta.timestamp, a.rel))
    taken = [False] * len(thermals)
    pairs: list[PairRecord] = []
    j0 = 0
    for rgb in rgbs:
        t_rgb = rgb.meta.timestamp
        # thermals that ended before this window can never match a later rgb
        while j0 < len(thermals) and (
            taken[j0] or (t_rgb - thermals[j0].meta.timestamp).total_seconds() > tolerance
        ):
            j0 += 1
        best = -1
        best_dt = None
        j = j0
        while j < len(thermals):
            dt = (t_rgb - thermals[j].meta.timestamp).total_seconds()
            if dt < -tolerance:
                break
            if not taken[j] and abs(dt) <= tolerance:
                if best_dt is None or abs(dt) < abs(best_dt):
                    best, best_dt = j, dt
                # ties keep the earlier thermal (first seen in time order)
            j += 1
        if best >= 0:
            taken[best] = True
            thermal = thermals[best]
            pairs.append(
                PairRecord(
                    pair_id=make_pair_id(rgb.rel, thermal.rel),
                    rgb=rgb,
                    thermal=thermal,
                    delta_t=best_dt,
                )
            )
    paired = {id(p.rgb) for p in pairs} | {id(p.thermal) for p in pairs}
    unmatched = [a for a in rgbs + thermals if id(a) not in paired]
    return pairs, unmatched


def pair_assets(
    assets: list[MediaAsset], tolerance: float = DEFAULT_TOLERANCE_S
) -> tuple[list[PairRecord], list[MediaAsset]]:
    """Match RGB assets to thermal assets of the same kind by timestamp.

    Returns (pairs, unmatched); every input asset lands in exactly one of the
    two. Pairs satisfy |delta_t| <= tolerance and no asset is used twice.
    """
    if tolerance <= 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    pairs: list[PairRecord] = []
    unmatched: list[MediaAsset] = []
    for kind in MediaKind:
        rgbs = [a for a in assets if a.kind == kind and a.modality == Modality.RGB]
        thermals = [a for a in assets if a.kind == kind and a.modality == Modality.THERMAL]
        kind_pairs, kind_unmatched = _match_kind(rgbs, thermals, tolerance)
        pairs.extend(kind_pairs)
        unmatched.extend(kind_unmatched)
    pairs.sort(key=lambda p: (p.timestamp, p.pair_id))
    unmatched.sort(key=lambda a: (a.meta.timestamp, a.rel))
    return pairs, unmatched


PAIRS_CSV_FIELDS = [
    "pair_id", "rgb_path", "thermal_path", "delta_t_s", "camera_model", "timestamp_iso8601",
]


@dataclass
class PairsRow:
    """One row of the pairs manifest (paths relative to the scanned input root)."""

    pair_id: str
    rgb_path: str
    thermal_path: str
    delta_t: float
    camera_model: str
    timestamp: datetime


def pairs_csv_text(pairs: list[PairRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PAIRS_CSV_FIELDS)
    for p in sorted(pairs, key=lambda p: (p.timestamp, p.pair_id)):
        writer.writerow(
            [p.pair_id, p.rgb.rel, p.thermal.rel, f"{p.delta_t:.3f}",
             p.camera_model, p.thermal.meta.iso()]
        )
    return buf.getvalue()


def write_pairs_csv(pairs: list[PairRecord], path: str | Path) -> None:
    Path(path).write_text(pairs_csv_text(pairs))


def read_pairs_csv(path: str | Path) -> list[PairsRow]:
    rows: list[PairsRow] = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(
                PairsRow(
                    pair_id=rec["pair_id"],
                    rgb_path=rec["rgb_path"],
                    thermal_path=rec["thermal_path"],
                    delta_t=float(rec["delta_t_s"]),
                    camera_model=rec["camera_model"],
                    timestamp=datetime.fromisoformat(rec["timestamp_iso8601"]),
                )
            )
    return rows
