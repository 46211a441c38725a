"""Fire/No-Fire labeling from radiometric maxima, pixel masks, and dataset layout.

Auto-labeling applies the frame-level rule: a frame whose maximum temperature
stays below the no-fire ceiling is No-Fire, one exceeding the fire floor is
Fire, and everything between (including values exactly on a threshold) goes to
human review. Pixel-level masks come from plain, Otsu, or hysteresis
thresholding of the temperature grid.
"""

from __future__ import annotations

import csv
import io
import shutil
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

import numpy as np
from scipy import ndimage

from .colormap import NormalizationMode, render_normalized_png
from .errors import (
    DegenerateRaster,
    InvalidThresholdOrder,
    IoFailure,
    UnlabeledPair,
)
from .raster import TemperatureRaster, utc
from .tiffio import read_tiff
from .util import atomic_write_text


class Label(Enum):
    FIRE = "FIRE"
    NO_FIRE = "NO_FIRE"
    NEEDS_REVIEW = "NEEDS_REVIEW"
    DISCARD = "DISCARD"


class LabelSource(Enum):
    AUTO = "AUTO"
    HUMAN = "HUMAN"


LABEL_FOLDERS = {
    Label.FIRE: "Fire",
    Label.NO_FIRE: "NoFire",
    Label.NEEDS_REVIEW: "NeedsReview",
    Label.DISCARD: "Discard",
}


@dataclass(frozen=True)
class ThresholdConfig:
    no_fire_max: float = 80.0
    fire_min: float = 200.0

    def __post_init__(self) -> None:
        if not self.no_fire_max < self.fire_min:
            raise ValueError(
                f"no_fire_max ({self.no_fire_max}) must stay below fire_min ({self.fire_min})"
            )


@dataclass
class LabelRecord:
    pair_id: str
    label: Label
    source: LabelSource
    max_temp: float
    decided_at: datetime

    def __post_init__(self) -> None:
        self.decided_at = utc(self.decided_at)
        if self.source == LabelSource.AUTO and self.label == Label.DISCARD:
            raise ValueError("DISCARD is a human-only decision")


def auto_label(
    raster: TemperatureRaster,
    cfg: ThresholdConfig = ThresholdConfig(),
    pair_id: str = "",
    decided_at: datetime | None = None,
) -> LabelRecord:
    """Preliminary label from the frame's maximum temperature.

    Boundary values (max exactly at a threshold) fall into NEEDS_REVIEW.
    decided_at defaults to now; batch callers pass the capture timestamp so
    reruns are reproducible.
    """
    max_temp = raster.max_temp
    if max_temp < cfg.no_fire_max:
        label = Label.NO_FIRE
    elif max_temp > cfg.fire_min:
        label = Label.FIRE
    else:
        label = Label.NEEDS_REVIEW
    return LabelRecord(
        pair_id=pair_id,
        label=label,
        source=LabelSource.AUTO,
        max_temp=max_temp,
        decided_at=decided_at or datetime.now(timezone.utc),
    )


def binary_mask(raster: TemperatureRaster, threshold: float) -> np.ndarray:
    """Boolean mask of pixels at or above the threshold."""
    return raster.values >= threshold


def otsu_threshold(raster: TemperatureRaster) -> float:
    """Threshold maximizing between-class variance on a 256-bin quantization.

    Returns the bin-boundary temperature (min + k*(max-min)/256 for the best
    split k in 1..255); ties break toward the lower threshold. The argmax is
    computed in exact integer arithmetic so it always agrees with exhaustive
    search, even on near-ties where float summation order would matter.
    """
    values = raster.values
    vmin, vmax = float(values.min()), float(values.max())
    if vmin == vmax:
        raise DegenerateRaster("constant raster has no threshold")
    idx = np.minimum(((values - vmin) / (vmax - vmin) * 256.0).astype(np.int64), 255)
    hist = np.bincount(idx.ravel(), minlength=256)

    total = int(hist.sum())
    total_sum = int((hist * np.arange(256)).sum())
    best_k = None
    best_num_sq = best_den = 1  # best variance so far as num^2 / den
    n0 = s0 = 0
    for k in range(1, 256):
        n0 += int(hist[k - 1])
        s0 += (k - 1) * int(hist[k - 1])
        n1 = total - n0
        if n0 == 0 or n1 == 0:
            continue
        num = s0 * n1 - (total_sum - s0) * n0
        den = n0 * n1
        if best_k is None or num * num * best_den > best_num_sq * den:
            best_k, best_num_sq, best_den = k, num * num, den
    return vmin + best_k * (vmax - vmin) / 256.0


_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def hysteresis_mask(raster: TemperatureRaster, low: float, high: float) -> np.ndarray:
    """Seeds at T >= high grown through 8-connected pixels with T >= low.

    low == high degenerates to binary_mask(raster, low); low > high is an
    error.
    """
    if low > high:
        raise InvalidThresholdOrder(f"low ({low}) exceeds high ({high})")
    low_mask = raster.values >= low
    seeds = raster.values >= high
    if not seeds.any():
        return np.zeros_like(low_mask)
    components, _ = ndimage.label(low_mask, structure=_EIGHT_CONNECTED)
    seeded = np.unique(components[seeds])
    return np.isin(components, seeded[seeded > 0])


# ---- labels manifest ----

LABELS_CSV_FIELDS = ["pair_id", "label", "source", "max_temp_c", "decided_at_iso8601"]


def labels_csv_text(records: dict[str, LabelRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(LABELS_CSV_FIELDS)
    for pair_id in sorted(records):
        r = records[pair_id]
        writer.writerow(
            [r.pair_id, r.label.value, r.source.value, f"{r.max_temp:.2f}",
             r.decided_at.isoformat(timespec="milliseconds")]
        )
    return buf.getvalue()


def records_equivalent(a: LabelRecord | None, b: LabelRecord | None) -> bool:
    """Equality at persisted precision (max_temp is stored with 2 decimals)."""
    if a is None or b is None:
        return a is b
    return (
        a.pair_id == b.pair_id
        and a.label == b.label
        and a.source == b.source
        and f"{a.max_temp:.2f}" == f"{b.max_temp:.2f}"
        and a.decided_at == b.decided_at
    )


class LabelStore:
    """labels.csv persistence: single source of truth, atomic rewrite on change."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def load(self) -> dict[str, LabelRecord]:
        if not self.path.exists():
            return {}
        records: dict[str, LabelRecord] = {}
        with open(self.path, newline="") as fh:
            for rec in csv.DictReader(fh):
                records[rec["pair_id"]] = LabelRecord(
                    pair_id=rec["pair_id"],
                    label=Label(rec["label"]),
                    source=LabelSource(rec["source"]),
                    max_temp=float(rec["max_temp_c"]),
                    decided_at=datetime.fromisoformat(rec["decided_at_iso8601"]),
                )
        return records

    def save(self, records: dict[str, LabelRecord]) -> None:
        atomic_write_text(self.path, labels_csv_text(records))

    def upsert(self, record: LabelRecord) -> None:
        records = self.load()
        records[record.pair_id] = record
        self.save(records)


# ---- workspace sorting and ML export ----

@dataclass
class PairFiles:
    """Per-pair derived files plus the capture timestamp for stable ordering."""

    pair_id: str
    timestamp: datetime
    rgb_jpeg: Path
    thermal_jpeg: Path
    tiff: Path

    def outputs(self) -> dict[str, Path]:
        return {"_rgb.jpg": self.rgb_jpeg, "_ir.jpg": self.thermal_jpeg, "_ir.tiff": self.tiff}


@dataclass
class SortReport:
    copied: int = 0
    unchanged: int = 0
    removed: int = 0

    @property
    def changes(self) -> int:
        return self.copied + self.removed


def _copy_if_changed(src: Path, dest: Path) -> bool:
    if dest.exists() and dest.read_bytes() == src.read_bytes():
        return False
    shutil.copyfile(src, dest)
    return True


def sort_pairs(
    pairs: list[PairFiles],
    labels: dict[str, LabelRecord],
    out_root: str | Path,
) -> SortReport:
    """Copy each pair's files into the folder named after its label.

    Copies, never moves (raw field data is irreplaceable). Idempotent: a rerun
    on unchanged inputs reports zero changes. A pair relabeled since the last
    run is removed from its old folder so no file lives under two labels.
    """
    out_root = Path(out_root)
    report = SortReport()
    try:
        for folder in LABEL_FOLDERS.values():
            (out_root / folder).mkdir(parents=True, exist_ok=True)
        for pair in sorted(pairs, key=lambda p: (p.timestamp, p.pair_id)):
            record = labels.get(pair.pair_id)
            if record is None:
                raise UnlabeledPair(f"pair {pair.pair_id} has no label")
            folder = LABEL_FOLDERS[record.label]
            for suffix, src in pair.outputs().items():
                name = f"{pair.pair_id}{suffix}"
                if _copy_if_changed(src, out_root / folder / name):
                    report.copied += 1
                for other in LABEL_FOLDERS.values():
                    if other != folder and (out_root / other / name).exists():
                        (out_root / other / name).unlink()
                        report.removed += 1
            report.unchanged += 1
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return report


DATASET_CSV_FIELDS = [
    "pair_id", "label", "rgb_path", "thermal_path", "tiff_path", "normalized_path", "max_temp_c",
]

EXPORT_NORMALIZATION = NormalizationMode.fixed(0.0, 400.0)


def export_ml_dataset(
    pairs: list[PairFiles],
    labels: dict[str, LabelRecord],
    normalization: NormalizationMode,
    out_root: str | Path,
) -> list[dict[str, str]]:
    """Emit the training-ready tree for FIRE/NO_FIRE pairs plus dataset.csv.

    Per pair: aligned RGB JPEG, regenerated thermal JPEG, raw float TIFF, and
    the 0-255 normalized single-band PNG. NEEDS_REVIEW and DISCARD pairs are
    excluded. Returns the manifest rows (paths relative to out_root).
    """
    out_root = Path(out_root)
    rows: list[dict[str, str]] = []
    try:
        for sub in ("rgb", "thermal", "tiff", "norm"):
            (out_root / sub).mkdir(parents=True, exist_ok=True)
        for pair in sorted(pairs, key=lambda p: (p.timestamp, p.pair_id)):
            record = labels.get(pair.pair_id)
            if record is None:
                raise UnlabeledPair(f"pair {pair.pair_id} has no label")
            if record.label not in (Label.FIRE, Label.NO_FIRE):
                continue
            dests = {
                "rgb_path": (out_root / "rgb" / f"{pair.pair_id}.jpg", pair.rgb_jpeg),
                "thermal_path": (out_root / "thermal" / f"{pair.pair_id}.jpg", pair.thermal_jpeg),
                "tiff_path": (out_root / "tiff" / f"{pair.pair_id}.tiff", pair.tiff),
            }
            for dest, src in dests.values():
                _copy_if_changed(src, dest)
            raster = read_tiff(pair.tiff)
            norm_path = out_root / "norm" / f"{pair.pair_id}.png"
            png = render_normalized_png(raster, normalization)
            if not (norm_path.exists() and norm_path.read_bytes() == png):
                norm_path.write_bytes(png)
            rows.append(
                {
                    "pair_id": pair.pair_id,
                    "label": record.label.value,
                    "rgb_path": f"rgb/{pair.pair_id}.jpg",
                    "thermal_path": f"thermal/{pair.pair_id}.jpg",
                    "tiff_path": f"tiff/{pair.pair_id}.tiff",
                    "normalized_path": f"norm/{pair.pair_id}.png",
                    "max_temp_c": f"{record.max_temp:.2f}",
                }
            )
        buf = io.StringIO()
        writer = csv.DictWriter(buf, DATASET_CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        atomic_write_text(out_root / "dataset.csv", buf.getvalue())
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return rows


def relabel(record: LabelRecord, label: Label, decided_at: datetime | None = None) -> LabelRecord:
    """Human override of an existing record."""
    return replace(
        record,
        label=label,
        source=LabelSource.HUMAN,
        decided_at=decided_at or datetime.now(timezone.utc),
    )
