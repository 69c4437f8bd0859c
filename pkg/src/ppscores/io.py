"""CSV and JSON emission with reproducible formatting.

All floats are written with %.12g so reruns with identical configs and seeds
produce byte-identical files.  Emitted tables start with a comment line
carrying the config hash, root seed, and Monte-Carlo settings.
"""

import csv
import hashlib
import json
import os

import numpy as np

from .geometry import PointPattern, RGrid, Window
from .estimators import Curve, IntensityField


def fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def config_hash(obj) -> str:
    """Stable short hash of a JSON-serializable config object."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def provenance_line(**fields):
    parts = " ".join(f"{k}={fmt(v)}" for k, v in sorted(fields.items()))
    return f"# {parts}"


def write_table(path, header, rows, provenance=None):
    """Write a CSV table with an optional leading provenance comment."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        if provenance:
            fh.write(provenance + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def read_table(path):
    """Read a CSV table written by write_table; returns (header, rows)."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


# ---------------------------------------------------------------------------
# Patterns and catalogs


def write_pattern_csv(path, p: PointPattern):
    write_table(path, ["x", "y"], p.points)


def read_pattern_csv(path, window: Window) -> PointPattern:
    """Read a pattern CSV (header x,y); the window comes from the run config,
    never from the data."""
    header, rows = read_table(path)
    cols = {name: i for i, name in enumerate(header)}
    if "x" not in cols or "y" not in cols:
        raise ValueError(f"{path}: expected columns x,y, got {header}")
    pts = np.array([[float(r[cols["x"]]), float(r[cols["y"]])] for r in rows])
    if pts.size == 0:
        pts = np.empty((0, 2))
    return PointPattern(pts, window)


def read_patterns_dir(directory, window: Window):
    """All *.csv patterns in a directory, sorted by filename."""
    names = sorted(f for f in os.listdir(directory) if f.endswith(".csv"))
    if not names:
        raise ValueError(f"no pattern CSVs in {directory}")
    return [read_pattern_csv(os.path.join(directory, f), window) for f in names], names


def write_catalog_csv(path, x, y, magnitude=None, period=None):
    header = ["x", "y"]
    cols = [np.asarray(x, dtype=float), np.asarray(y, dtype=float)]
    if magnitude is not None:
        header.append("magnitude")
        cols.append(np.asarray(magnitude, dtype=float))
    if period is not None:
        header.append("period")
        cols.append(np.asarray(period))
    write_table(path, header, zip(*cols))


def read_catalog_csv(path):
    """Catalog CSV with columns x,y and optional magnitude and period.
    Returns a dict of arrays (missing optional columns map to None)."""
    header, rows = read_table(path)
    cols = {name: i for i, name in enumerate(header)}
    if "x" not in cols or "y" not in cols:
        raise ValueError(f"{path}: expected columns x,y, got {header}")
    out = {
        "x": np.array([float(r[cols["x"]]) for r in rows]),
        "y": np.array([float(r[cols["y"]]) for r in rows]),
        "magnitude": None,
        "period": None,
    }
    if "magnitude" in cols:
        out["magnitude"] = np.array([float(r[cols["magnitude"]]) for r in rows])
    if "period" in cols:
        out["period"] = np.array([int(r[cols["period"]]) for r in rows])
    return out


# ---------------------------------------------------------------------------
# Curves, fields, scores


def write_curve_csv(path, c: Curve, provenance=None):
    write_table(path, ["r", "value"],
                zip(c.grid.values, c.values), provenance)


def read_curve_csv(path) -> Curve:
    _, rows = read_table(path)
    r = np.array([float(row[0]) for row in rows])
    v = np.array([float(row[1]) for row in rows])
    return Curve(RGrid(r), v)


def write_field_csv(path, f: IntensityField, provenance=None):
    w = f.window
    nx, ny = f.shape
    xs = np.linspace(w.xmin, w.xmax, nx + 1)
    ys = np.linspace(w.ymin, w.ymax, ny + 1)
    cx = (xs[:-1] + xs[1:]) / 2.0
    cy = (ys[:-1] + ys[1:]) / 2.0
    rows = ((cx[i], cy[j], f.values[i, j])
            for i in range(nx) for j in range(ny))
    write_table(path, ["x", "y", "value"], rows, provenance)


def write_scores_csv(path, rows, provenance=None):
    """rows: iterable of (obs_id, score_name, value, n, seed)."""
    write_table(path, ["obs_id", "score_name", "value", "n", "seed"],
                rows, provenance)


def read_scores_csv(path):
    _, rows = read_table(path)
    return [
        {"obs_id": r[0], "score_name": r[1], "value": float(r[2]),
         "n": int(r[3]), "seed": int(r[4])}
        for r in rows
    ]


def write_json(path, obj):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
