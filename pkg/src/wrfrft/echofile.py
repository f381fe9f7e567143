"""Header-plus-binary container for echo matrices and exported maps.

Layout: an ASCII header of ``key=value`` lines opened by a magic line and
closed by ``end-header``, followed by the raw little-endian payload in
C order with the fast-time (cell) axis major.  Writing then reading a file
reproduces it bit for bit.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import DtypeMismatchError, MalformedHeaderError, PayloadSizeError
from .signal_model import EchoMatrix, RadarParams

ECHO_MAGIC = "wrfrft-echo 1"
MATRIX_MAGIC = "wrfrft-matrix 1"
_END = "end-header"
_DTYPES = {"complex64": np.dtype("<c8"), "float32": np.dtype("<f4")}


def _write_container(path, magic: str, fields: dict, payload: np.ndarray):
    lines = [magic]
    lines += [f"{k}={v}" for k, v in fields.items()]
    lines.append(_END)
    header = ("\n".join(lines) + "\n").encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes(order="C"))


def _read_container(path, magic: str):
    blob = Path(path).read_bytes()
    marker = (_END + "\n").encode("ascii")
    pos = blob.find(marker)
    if pos < 0:
        raise MalformedHeaderError(f"{path}: missing '{_END}' delimiter")
    try:
        text = blob[:pos].decode("ascii")
    except UnicodeDecodeError as exc:
        raise MalformedHeaderError(f"{path}: header is not ascii") from exc
    lines = text.splitlines()
    if not lines or lines[0] != magic:
        raise MalformedHeaderError(f"{path}: expected magic {magic!r}")
    fields = {}
    for ln in lines[1:]:
        if not ln.strip():
            continue
        if "=" not in ln:
            raise MalformedHeaderError(f"{path}: bad header line {ln!r}")
        k, v = ln.split("=", 1)
        fields[k.strip()] = v.strip()
    return fields, blob[pos + len(marker):]


def _decode_payload(path, fields, raw):
    if "dtype" not in fields or "dims" not in fields:
        raise MalformedHeaderError(f"{path}: header must declare dims and dtype")
    dtype_name = fields["dtype"]
    if dtype_name not in _DTYPES:
        raise DtypeMismatchError(f"{path}: unsupported dtype {dtype_name!r}")
    try:
        dims = tuple(int(d) for d in fields["dims"].split(","))
    except ValueError as exc:
        raise MalformedHeaderError(f"{path}: unparsable dims {fields['dims']!r}") from exc
    dt = _DTYPES[dtype_name]
    expected = int(np.prod(dims)) * dt.itemsize
    if len(raw) != expected:
        raise PayloadSizeError(expected, len(raw))
    return np.frombuffer(raw, dtype=dt).reshape(dims)


def save_echo_file(echo: EchoMatrix, path) -> None:
    r = echo.radar
    fields = {
        "dims": f"{echo.num_cells},{echo.num_pulses}",
        "dtype": "complex64",
        "cell_size_m": repr(r.cell_size),
        "prf": repr(r.prf),
        "t0": repr(r.t0),
        "t1": repr(r.t1),
        "fc": repr(r.fc),
        "bandwidth": repr(r.bandwidth),
        "fs": repr(r.fs),
        "tp": repr(r.tp),
    }
    _write_container(path, ECHO_MAGIC, fields, echo.data.astype("<c8"))


def load_echo_file(path) -> EchoMatrix:
    fields, raw = _read_container(path, ECHO_MAGIC)
    data = _decode_payload(path, fields, raw)
    try:
        radar = RadarParams(
            fc=float(fields["fc"]), bandwidth=float(fields["bandwidth"]),
            fs=float(fields["fs"]), prf=float(fields["prf"]),
            tp=float(fields["tp"]), t0=float(fields["t0"]), t1=float(fields["t1"]))
    except KeyError as exc:
        raise MalformedHeaderError(f"{path}: missing radar field {exc}") from exc
    return EchoMatrix(data=data, radar=radar)


def save_matrix_file(matrix: np.ndarray, path, axes: dict | None = None,
                     labels: dict | None = None) -> None:
    """Persist a 2-d map (amplitude: float32, spectra: complex64)."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise MalformedHeaderError("matrix container stores 2-d arrays")
    dtype_name = "complex64" if np.iscomplexobj(matrix) else "float32"
    fields = {"dims": f"{matrix.shape[0]},{matrix.shape[1]}", "dtype": dtype_name}
    for axis_idx, (name, values) in enumerate((axes or {}).items()):
        fields[f"axis{axis_idx}_name"] = name
        fields[f"axis{axis_idx}_values"] = ",".join(repr(float(v)) for v in values)
    for k, v in (labels or {}).items():
        fields[f"label_{k}"] = str(v)
    _write_container(path, MATRIX_MAGIC, fields, matrix.astype(_DTYPES[dtype_name]))


def load_matrix_file(path):
    """Returns (matrix, axes, labels)."""
    fields, raw = _read_container(path, MATRIX_MAGIC)
    data = _decode_payload(path, fields, raw)
    axes = {}
    for axis_idx in range(2):
        name = fields.get(f"axis{axis_idx}_name")
        vals = fields.get(f"axis{axis_idx}_values")
        if name is not None and vals is not None:
            axes[name] = np.array([float(v) for v in vals.split(",")])
    labels = {k[len("label_"):]: v for k, v in fields.items() if k.startswith("label_")}
    return data, axes, labels
