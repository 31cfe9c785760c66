"""CSV writers for polylines, ellipse tables and horizon reports."""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .ellipse import HorizonEllipse, min_ellipse_params
from .sim.model import fmt

PathLike = Union[str, Path]


def _write_rows(path: PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, float) else v for v in row])
    return path


def write_polyline_csv(path: PathLike, ring: np.ndarray) -> Path:
    """``x,y`` rows; the ring is closed (first vertex repeated) if it is not already."""
    ring = np.asarray(ring, dtype=float)
    if not np.array_equal(ring[0], ring[-1]):
        ring = np.vstack([ring, ring[:1]])
    return _write_rows(path, ["x", "y"], ((float(x), float(y)) for x, y in ring))


def write_ellipse_table(path: PathLike, times: Iterable[float]) -> Path:
    rows = []
    for t in times:
        A, B = min_ellipse_params(t)
        rows.append((float(t), A, B))
    return _write_rows(path, ["t", "A", "B"], rows)


def write_ellipse_boundary(path: PathLike, e: HorizonEllipse, n: int = 256) -> Path:
    return write_polyline_csv(path, e.boundary(n))


def write_table(path: PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    return _write_rows(path, header, rows)


def time_tag(t: float) -> str:
    """File-name fragment for a time value, e.g. ``2.5`` or ``3.14159265``."""
    return fmt(float(t))
