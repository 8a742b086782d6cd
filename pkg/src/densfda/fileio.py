"""CSV/JSON serialization and the run manifest.

Density tables are CSV with an ``x`` first column (the grid) and one
column per subject; transformed functions use ``t`` as the first column.
All floats are written with 17 significant digits so a write/read round
trip reproduces binary64 values exactly.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .density import DensityFn, Grid, normalize
from .transforms import TransformedFn, TransformSpec

ARTIFACT_VERSION = "0.1.0"
FLOAT_FMT = "%.17g"


def _fmt(v) -> str:
    return FLOAT_FMT % float(v)


def _uniform_grid_from(points: np.ndarray) -> Grid:
    lo, hi, m = float(points[0]), float(points[-1]), len(points)
    grid = Grid(lo, hi, m)
    if np.abs(points - grid.points).max() > 1e-9 * max(abs(lo), abs(hi), 1.0):
        raise ValueError("first CSV column is not a uniform grid")
    return grid


def _write_table(path, first_name: str, points: np.ndarray, columns, ids):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([first_name, *ids])
        for j, x in enumerate(points):
            writer.writerow([_fmt(x), *(_fmt(col[j]) for col in columns)])


def _read_table(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    return header, data[:, 0], data[:, 1:].T


def write_density_csv(path, densities, ids=None):
    densities = list(densities)
    ids = ids or [f"subject_{i + 1}" for i in range(len(densities))]
    grid = densities[0].grid
    _write_table(path, "x", grid.points, [f.values for f in densities], ids)


def read_density_csv(path, floor: float = 0.0):
    """Read densities, renormalizing each column to the grid quadrature."""
    header, points, columns = _read_table(path)
    grid = _uniform_grid_from(points)
    return [normalize(col, grid, floor) for col in columns], header[1:]


def write_transformed_csv(path, xs, ids=None):
    xs = list(xs)
    ids = ids or [f"subject_{i + 1}" for i in range(len(xs))]
    _write_table(path, "t", xs[0].tgrid.points, [x.values for x in xs], ids)


def read_transformed_csv(path, spec: TransformSpec, support=(0.0, 1.0)):
    header, points, columns = _read_table(path)
    grid = _uniform_grid_from(points)
    return [TransformedFn(grid, col, spec, tuple(support)) for col in columns], header[1:]


def write_quantile_csv(path, tgrid: Grid, columns, ids):
    _write_table(path, "t", tgrid.points, columns, ids)


def read_samples_csv(path):
    """Two-column ``subject_id,value`` CSV -> ordered {id: samples array}."""
    groups: dict[str, list[float]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip().lower() for h in header[:2]] != ["subject_id", "value"]:
            raise ValueError("sample CSV must have header 'subject_id,value'")
        for row in reader:
            if not row:
                continue
            groups.setdefault(row[0], []).append(float(row[1]))
    return {k: np.asarray(v) for k, v in groups.items()}


def read_response_csv(path):
    """Two-column ``subject_id,value`` CSV of scalar responses."""
    out = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            if row:
                out[row[0]] = float(row[1])
    return out


def write_json(path, payload: dict):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Reproducibility record written alongside every output file."""

    command: str
    argv: list
    seed: int | None
    inputs: dict = field(default_factory=dict)  # path -> sha256 of bytes
    artifact_version: str = ARTIFACT_VERSION
    timestamp: str = ""

    def write(self, out_path):
        self.timestamp = time.strftime("%Y-%m-%dT%H:%M:%S%z")
        write_json(f"{out_path}.manifest.json", asdict(self))


def density_to_dict(f: DensityFn) -> dict:
    return {
        "lo": f.grid.lo,
        "hi": f.grid.hi,
        "m": f.grid.m,
        "values": [float(v) for v in f.values],
    }
