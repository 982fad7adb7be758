"""CSV, SVG and JSON Lines serialization for curves and flow traces."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .curves import DiscreteCurve, as_curve


class CurveFileError(ValueError):
    """Raised for unreadable or malformed curve files."""


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_csv(c, path) -> None:
    """Write one ``x,y`` row per vertex under an ``x,y`` header; the first vertex is not repeated."""
    c = as_curve(c)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y"])
        for x, y in c.vertices:
            w.writerow([fmt(x), fmt(y)])


def read_csv(path) -> DiscreteCurve:
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise CurveFileError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise CurveFileError(f"{path} is empty")
    if [h.strip().lower() for h in rows[0]] == ["x", "y"]:
        rows = rows[1:]
    try:
        pts = np.array([[float(a), float(b)] for a, b in (r for r in rows if r)], dtype=float)
    except ValueError as exc:
        raise CurveFileError(f"{path}: rows must be two numbers 'x,y'") from exc
    try:
        return DiscreteCurve(pts.reshape(-1, 2))
    except ValueError as exc:
        raise CurveFileError(f"{path}: {exc}") from exc


def write_svg(c, path, stroke: str = "black", margin: float = 0.05, size: int = 600) -> None:
    """Static SVG with the closed polyline scaled into a square canvas."""
    x = as_curve(c).vertices
    lo, hi = x.min(axis=0), x.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    pad = margin * span
    scale = size / (span + 2 * pad)
    # flip y so the picture matches the usual mathematical orientation
    px = (x[:, 0] - lo[0] + pad) * scale
    py = size - (x[:, 1] - lo[1] + pad) * scale
    pts = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(px, py))
    Path(path).write_text(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n'
        f'  <polygon points="{pts}" fill="none" stroke="{stroke}" stroke-width="1"/>\n'
        "</svg>\n"
    )


def append_jsonl(record: dict, fh) -> None:
    fh.write(json.dumps(record, sort_keys=False) + "\n")


def read_jsonl(path) -> list:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
