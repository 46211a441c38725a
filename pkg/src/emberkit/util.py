"""Small shared helpers: explicit rounding and atomic file replacement."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np


def round_half_away(x):
    """Round half away from zero, elementwise (platform-independent).

    numpy's default rounds half to even; labeling and encoding contracts pin
    the away-from-zero rule instead.
    """
    x = np.asarray(x)
    return np.where(x >= 0, np.floor(x + 0.5), np.ceil(x - 0.5))


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    """Write via temp file + rename so readers never see a partial file."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: str | Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))
