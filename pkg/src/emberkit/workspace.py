"""Sorted-workspace layout: one place that knows where derived files live.

A workspace is the output tree produced by the sort step and consumed by
labeling, export, the review service, and the nadir products:

    out/
      pairs.csv            pairing manifest (all kinds)
      labels.csv           label manifest (single source of truth)
      tiff/                {pair_id}_ir.tiff       decoded temperature rasters
      thermal_jpeg/        {pair_id}_ir.jpg        regenerated palette JPEGs
      aligned_rgb/         {pair_id}_rgb.jpg       FOV-corrected RGB frames
      video/               {pair_id}_{rgb,ir}.mp4  paired video copies
      Fire/ NoFire/ NeedsReview/ Discard/          label-sorted copies
      nadir/{plot_id}/     arrival/ROS/energy products
      export/              ML export tree (dataset.csv, rgb/, thermal/, ...)
"""

from __future__ import annotations

from pathlib import Path

from .errors import UnknownPair, WorkspaceNotFound
from .labeling import LabelStore, PairFiles
from .pairing import PairsRow, read_pairs_csv
from .raster import TemperatureRaster
from .tiffio import read_tiff


class Workspace:
    def __init__(self, root: str | Path):
        self.root = Path(root)

    # ---- layout ----

    @property
    def pairs_csv(self) -> Path:
        return self.root / "pairs.csv"

    @property
    def labels_csv(self) -> Path:
        return self.root / "labels.csv"

    @property
    def tiff_dir(self) -> Path:
        return self.root / "tiff"

    @property
    def thermal_jpeg_dir(self) -> Path:
        return self.root / "thermal_jpeg"

    @property
    def aligned_rgb_dir(self) -> Path:
        return self.root / "aligned_rgb"

    @property
    def video_dir(self) -> Path:
        return self.root / "video"

    @property
    def nadir_dir(self) -> Path:
        return self.root / "nadir"

    @property
    def export_dir(self) -> Path:
        return self.root / "export"

    def create_dirs(self) -> None:
        for d in (self.tiff_dir, self.thermal_jpeg_dir, self.aligned_rgb_dir):
            d.mkdir(parents=True, exist_ok=True)

    # ---- manifests ----

    def require(self) -> "Workspace":
        if not self.pairs_csv.exists():
            raise WorkspaceNotFound(f"no pairs manifest under {self.root}")
        return self

    def load_pairs(self) -> list[PairsRow]:
        self.require()
        return read_pairs_csv(self.pairs_csv)

    def image_pairs(self) -> list[PairsRow]:
        """Pairs that have per-pair derived rasters (i.e. not videos)."""
        return [row for row in self.load_pairs() if self.tiff_path(row.pair_id).exists()]

    def label_store(self) -> LabelStore:
        return LabelStore(self.labels_csv)

    # ---- per-pair files ----

    def tiff_path(self, pair_id: str) -> Path:
        return self.tiff_dir / f"{pair_id}_ir.tiff"

    def thermal_jpeg_path(self, pair_id: str) -> Path:
        return self.thermal_jpeg_dir / f"{pair_id}_ir.jpg"

    def aligned_rgb_path(self, pair_id: str) -> Path:
        return self.aligned_rgb_dir / f"{pair_id}_rgb.jpg"

    def pair_files(self, row: PairsRow) -> PairFiles:
        return PairFiles(
            pair_id=row.pair_id,
            timestamp=row.timestamp,
            rgb_jpeg=self.aligned_rgb_path(row.pair_id),
            thermal_jpeg=self.thermal_jpeg_path(row.pair_id),
            tiff=self.tiff_path(row.pair_id),
        )

    def raster(self, pair_id: str) -> TemperatureRaster:
        path = self.tiff_path(pair_id)
        if not path.exists():
            raise UnknownPair(f"no raster for pair {pair_id}")
        return read_tiff(path)
