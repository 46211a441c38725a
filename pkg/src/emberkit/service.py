"""HTTP review service: browse sorted pairs, inspect overlays, persist labels.

The review loop the labeling tool exposes: a queue of pairs pending human
judgment (NEEDS_REVIEW or any unreviewed AUTO label), per-pair RGB/thermal/
overlay views with a temperature histogram, single-keystroke label commits,
and batch pre-labeling. labels.csv stays the single source of truth; every
mutation is serialized behind one lock and durably written (temp file +
rename) before the response goes out. Human labels always win: no batch
operation overwrites them.
"""

from __future__ import annotations

import io
import threading
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from PIL import Image

from .align import overlay
from .colormap import JPEG_QUALITY
from .errors import InvalidLabel, UnknownPair
from .labeling import (
    Label,
    LabelRecord,
    LabelSource,
    ThresholdConfig,
    auto_label,
    records_equivalent,
)
from .pairing import PairsRow
from .workspace import Workspace

API_LABELS = {"fire": Label.FIRE, "no_fire": Label.NO_FIRE, "discard": Label.DISCARD}

HISTOGRAM_BINS = 256


class ReviewSession:
    """Workspace view + mutation serialization for the HTTP layer."""

    def __init__(self, root: str | Path, thresholds: ThresholdConfig | None = None):
        self.workspace = Workspace(root).require()
        self.thresholds = thresholds or ThresholdConfig()
        self.store = self.workspace.label_store()
        self.rows: dict[str, PairsRow] = {
            row.pair_id: row for row in self.workspace.image_pairs()
        }
        self._write_lock = threading.Lock()
        self._max_temp_cache: dict[str, float] = {}

    # ---- reads ----

    def row(self, pair_id: str) -> PairsRow:
        if pair_id not in self.rows:
            raise UnknownPair(f"unknown pair {pair_id}")
        return self.rows[pair_id]

    def max_temp(self, pair_id: str, records: dict[str, LabelRecord]) -> float:
        record = records.get(pair_id)
        if record is not None:
            return record.max_temp
        if pair_id not in self._max_temp_cache:
            self._max_temp_cache[pair_id] = self.workspace.raster(pair_id).max_temp
        return self._max_temp_cache[pair_id]

    def summaries(self, status: str) -> list[dict]:
        wanted_label = {
            "fire": Label.FIRE,
            "no_fire": Label.NO_FIRE,
            "needs_review": Label.NEEDS_REVIEW,
            "discard": Label.DISCARD,
        }.get(status)
        if status not in {"all", "pending"} and wanted_label is None:
            raise InvalidLabel(f"unknown status filter {status!r}")

        records = self.store.load()
        items = []
        for row in sorted(self.rows.values(), key=lambda r: (r.timestamp, r.pair_id)):
            record = records.get(row.pair_id)
            pending = record is None or record.label == Label.NEEDS_REVIEW \
                or record.source == LabelSource.AUTO
            if status == "pending" and not pending:
                continue
            if wanted_label is not None and (record is None or record.label != wanted_label):
                continue
            items.append(
                {
                    "pair_id": row.pair_id,
                    "timestamp": row.timestamp.isoformat(timespec="milliseconds"),
                    "max_temp_c": round(self.max_temp(row.pair_id, records), 2),
                    "label": record.label.value if record else None,
                    "source": record.source.value if record else None,
                    "pending": pending,
                }
            )
        return items

    def progress(self) -> dict:
        records = self.store.load()
        counts = {label.value: 0 for label in Label}
        human = auto = unlabeled = pending = 0
        for pair_id in self.rows:
            record = records.get(pair_id)
            if record is None:
                unlabeled += 1
                pending += 1
                continue
            counts[record.label.value] += 1
            if record.source == LabelSource.HUMAN:
                human += 1
            else:
                auto += 1
                pending += 1
        return {
            "total": len(self.rows),
            "fire": counts["FIRE"],
            "no_fire": counts["NO_FIRE"],
            "needs_review": counts["NEEDS_REVIEW"],
            "discard": counts["DISCARD"],
            "unlabeled": unlabeled,
            "human": human,
            "auto": auto,
            "pending": pending,
        }

    def histogram(self, pair_id: str) -> dict:
        raster = self.workspace.raster(self.row(pair_id).pair_id)
        vmin, vmax = raster.min_temp, raster.max_temp
        if vmin == vmax:
            bins = [0] * HISTOGRAM_BINS
            bins[0] = raster.values.size
        else:
            counts, _ = np.histogram(raster.values, bins=HISTOGRAM_BINS, range=(vmin, vmax))
            bins = counts.tolist()
        return {
            "pair_id": pair_id,
            "min_temp_c": vmin,
            "max_temp_c": vmax,
            "bin_width_c": (vmax - vmin) / HISTOGRAM_BINS,
            "bins": bins,
        }

    # ---- mutations ----

    def submit_label(self, pair_id: str, label_text: str, reviewer: str = "") -> LabelRecord:
        row = self.row(pair_id)
        if label_text not in API_LABELS:
            raise InvalidLabel(
                f"label must be one of {sorted(API_LABELS)}, got {label_text!r}"
            )
        with self._write_lock:
            records = self.store.load()
            record = LabelRecord(
                pair_id=pair_id,
                label=API_LABELS[label_text],
                source=LabelSource.HUMAN,
                max_temp=self.max_temp(pair_id, records),
                decided_at=datetime.now(timezone.utc),
            )
            records[pair_id] = record
            self.store.save(records)
        return record

    def batch_prelabel(self, cfg: ThresholdConfig) -> dict:
        with self._write_lock:
            records = self.store.load()
            changed = 0
            for pair_id, row in self.rows.items():
                existing = records.get(pair_id)
                if existing is not None and existing.source == LabelSource.HUMAN:
                    continue
                record = auto_label(
                    self.workspace.raster(pair_id), cfg,
                    pair_id=pair_id, decided_at=row.timestamp,
                )
                if not records_equivalent(existing, record):
                    changed += 1
                records[pair_id] = record
            self.store.save(records)
        counts = {"fire": 0, "no_fire": 0, "needs_review": 0, "discard": 0, "unlabeled": 0}
        for pair_id in self.rows:
            record = records.get(pair_id)
            if record is None:
                counts["unlabeled"] += 1
            else:
                counts[record.label.value.lower()] += 1
        return {"counts": counts, "changed": changed}


def _record_json(record: LabelRecord) -> dict:
    return {
        "pair_id": record.pair_id,
        "label": record.label.value,
        "source": record.source.value,
        "max_temp_c": round(record.max_temp, 2),
        "decided_at": record.decided_at.isoformat(timespec="milliseconds"),
    }


def create_app(
    workspace_root: str | Path,
    thresholds: ThresholdConfig | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    session = ReviewSession(workspace_root, thresholds)
    app = FastAPI(title="emberkit review service", version="0.1.0")

    @app.exception_handler(UnknownPair)
    async def unknown_pair(_: Request, exc: UnknownPair):
        return JSONResponse(status_code=404, content={"code": "UnknownPair", "message": str(exc)})

    @app.exception_handler(InvalidLabel)
    async def invalid_label(_: Request, exc: InvalidLabel):
        return JSONResponse(status_code=400, content={"code": "InvalidLabel", "message": str(exc)})

    @app.get("/api/pairs")
    def list_pairs(status: str = "pending", page: int = 1, page_size: int = 50):
        if page < 1 or page_size < 1:
            return JSONResponse(
                status_code=400,
                content={"code": "BadPage", "message": "page and page_size must be >= 1"},
            )
        items = session.summaries(status)
        total = len(items)
        pages = max((total + page_size - 1) // page_size, 1)
        start = (page - 1) * page_size
        return {
            "items": items[start : start + page_size],
            "page": page,
            "page_size": page_size,
            "total": total,
            "pages": pages,
        }

    @app.get("/api/pairs/{pair_id}")
    def pair_detail(pair_id: str):
        row = session.row(pair_id)
        records = session.store.load()
        record = records.get(pair_id)
        raster = session.workspace.raster(pair_id)
        return {
            "pair_id": pair_id,
            "timestamp": row.timestamp.isoformat(timespec="milliseconds"),
            "camera_model": row.camera_model,
            "delta_t_s": row.delta_t,
            "rgb_path": row.rgb_path,
            "thermal_path": row.thermal_path,
            "label": record.label.value if record else None,
            "source": record.source.value if record else None,
            "stats": {
                "width": raster.width,
                "height": raster.height,
                "min_temp_c": raster.min_temp,
                "max_temp_c": session.max_temp(pair_id, records),
                "mean_temp_c": float(raster.values.mean()),
            },
        }

    def _jpeg(data: bytes) -> Response:
        return Response(content=data, media_type="image/jpeg")

    @app.get("/api/pairs/{pair_id}/rgb.jpg")
    def rgb_image(pair_id: str):
        session.row(pair_id)
        return _jpeg(session.workspace.aligned_rgb_path(pair_id).read_bytes())

    @app.get("/api/pairs/{pair_id}/thermal.jpg")
    def thermal_image(pair_id: str):
        session.row(pair_id)
        return _jpeg(session.workspace.thermal_jpeg_path(pair_id).read_bytes())

    @app.get("/api/pairs/{pair_id}/overlay.jpg")
    def overlay_image(pair_id: str, threshold: float | None = None, opacity: float = 0.5):
        session.row(pair_id)
        if threshold is None:
            threshold = session.thresholds.fire_min
        opacity = min(max(opacity, 0.0), 1.0)
        raster = session.workspace.raster(pair_id)
        rgb = np.asarray(
            Image.open(session.workspace.aligned_rgb_path(pair_id)).convert("RGB")
        )
        blended = overlay(rgb, raster, threshold=threshold, opacity=opacity)
        buf = io.BytesIO()
        Image.fromarray(blended, "RGB").save(buf, format="JPEG", quality=JPEG_QUALITY)
        return _jpeg(buf.getvalue())

    @app.get("/api/pairs/{pair_id}/histogram")
    def histogram(pair_id: str):
        return session.histogram(pair_id)

    @app.post("/api/pairs/{pair_id}/label")
    def submit_label(pair_id: str, body: dict):
        label_text = body.get("label", "")
        record = session.submit_label(pair_id, label_text, reviewer=body.get("reviewer", ""))
        return _record_json(record)

    @app.post("/api/prelabel")
    def prelabel(body: dict | None = None):
        body = body or {}
        cfg = ThresholdConfig(
            no_fire_max=float(body.get("no_fire_max", session.thresholds.no_fire_max)),
            fire_min=float(body.get("fire_min", session.thresholds.fire_min)),
        )
        return session.batch_prelabel(cfg)

    @app.get("/api/progress")
    def progress():
        return session.progress()

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
