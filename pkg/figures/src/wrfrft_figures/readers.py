"""Readers for the toolkit's documented export formats.

This package deliberately reimplements the parsing from the published file
layouts (header-plus-binary matrix container, two-column curve CSV, and the
Monte-Carlo rows CSV) so the rendering stage stays independent of the
producing code.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

MATRIX_MAGIC = "wrfrft-matrix 1"
_END = "end-header"
_DTYPES = {"complex64": np.dtype("<c8"), "float32": np.dtype("<f4")}


class InputError(Exception):
    """An input file is missing or does not follow its documented format."""


def read_matrix(path):
    """Read a matrix container: (array, axes dict, labels dict)."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"input file not found: {path}")
    blob = path.read_bytes()
    marker = (_END + "\n").encode("ascii")
    pos = blob.find(marker)
    if pos < 0:
        raise InputError(f"{path}: missing '{_END}' delimiter")
    lines = blob[:pos].decode("ascii", errors="replace").splitlines()
    if not lines or lines[0] != MATRIX_MAGIC:
        raise InputError(f"{path}: expected magic {MATRIX_MAGIC!r}")
    fields = {}
    for ln in lines[1:]:
        if "=" in ln:
            k, v = ln.split("=", 1)
            fields[k.strip()] = v.strip()
    try:
        dims = tuple(int(d) for d in fields["dims"].split(","))
        dt = _DTYPES[fields["dtype"]]
    except KeyError as exc:
        raise InputError(f"{path}: header missing {exc}") from exc
    raw = blob[pos + len(marker):]
    expected = int(np.prod(dims)) * dt.itemsize
    if len(raw) != expected:
        raise InputError(f"{path}: payload holds {len(raw)} bytes, expected {expected}")
    data = np.frombuffer(raw, dtype=dt).reshape(dims)
    axes = {}
    for i in range(2):
        name = fields.get(f"axis{i}_name")
        vals = fields.get(f"axis{i}_values")
        if name and vals:
            axes[name] = np.array([float(v) for v in vals.split(",")])
    labels = {k[len("label_"):]: v for k, v in fields.items() if k.startswith("label_")}
    return data, axes, labels


def read_curve_csv(path):
    """Two-column curve file: (xname, x, yname, y)."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"input file not found: {path}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2 or len(rows[0]) != 2:
        raise InputError(f"{path}: expected a two-column curve CSV")
    xname, yname = rows[0]
    try:
        x = np.array([float(r[0]) for r in rows[1:]])
        y = np.array([float(r[1]) for r in rows[1:]])
    except (ValueError, IndexError) as exc:
        raise InputError(f"{path}: unparsable curve data") from exc
    return xname, x, yname, y


ROW_COLUMNS = ("method", "snr_db", "metric", "value", "ci_halfwidth", "trials", "seed0")


def read_rows_csv(path, metric):
    """Monte-Carlo rows filtered to one metric: {method: (snr, value)} sorted."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"input file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not set(ROW_COLUMNS) <= set(reader.fieldnames):
            raise InputError(f"{path}: expected columns {ROW_COLUMNS}")
        series = {}
        for row in reader:
            if row["metric"] != metric:
                continue
            series.setdefault(row["method"], []).append(
                (float(row["snr_db"]), float(row["value"])))
    if not series:
        raise InputError(f"{path}: no rows with metric {metric!r}")
    return {m: sorted(pts) for m, pts in series.items()}
