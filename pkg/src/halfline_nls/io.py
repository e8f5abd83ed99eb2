"""CSV diagnostics and flat binary field snapshots.

Snapshot layout (little endian)::

    4 bytes   magic b"HLNS"
    uint32    format version (1)
    uint32    n_t
    uint32    n_x
    float64   x_min, dx, t0, dt
    complex64 values[n_t, n_x], row-major (time major)
"""

from __future__ import annotations

import csv
import datetime as _dt
import struct
from pathlib import Path

import numpy as np

from .exceptions import InvalidInputError

MAGIC = b"HLNS"
VERSION = 1
_HEADER = struct.Struct("<4sIII4d")
DIAGNOSTIC_COLUMNS = ("t", "hs_norm", "mass", "boundary_residual")


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, columns, rows, header: dict | None = None, timestamp: bool = True) -> Path:
    """Write ``rows`` under ``columns``.

    Metadata and the creation time go to ``#`` comment lines so that the
    body is byte-identical between reruns of the same configuration.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        if timestamp:
            now = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
            fh.write(f"# created {now}\n")
        for key, val in (header or {}).items():
            fh.write(f"# {key} = {_fmt(val)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path):
    """``(columns, rows)`` of a file written by :func:`write_csv`; comment lines are skipped."""
    with Path(path).open() as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    columns = next(reader)
    return columns, [row for row in reader]


def csv_body(path) -> str:
    with Path(path).open() as fh:
        return "".join(ln for ln in fh if not ln.startswith("#"))


def diagnostics_rows(times, hs_norm, mass, boundary_residual):
    return list(zip(*(np.asarray(a, dtype=float) for a in (times, hs_norm, mass, boundary_residual))))


def write_snapshot(path, values, x_min: float, dx: float, t0: float, dt: float) -> Path:
    values = np.asarray(values)
    if values.ndim != 2:
        raise InvalidInputError(f"snapshot values must be (n_t, n_x), got shape {values.shape}")
    n_t, n_x = values.shape
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, n_t, n_x, x_min, dx, t0, dt))
        fh.write(np.ascontiguousarray(values, dtype="<c8").tobytes())
    return path


def read_snapshot(path):
    """``(values, meta)`` with ``meta`` holding ``x_min, dx, t0, dt, version``."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise InvalidInputError(f"{path}: truncated snapshot header")
    magic, version, n_t, n_x, x_min, dx, t0, dt = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise InvalidInputError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise InvalidInputError(f"{path}: unsupported version {version}")
    body = raw[_HEADER.size:]
    if len(body) != 8 * n_t * n_x:
        raise InvalidInputError(f"{path}: expected {8 * n_t * n_x} data bytes, found {len(body)}")
    values = np.frombuffer(body, dtype="<c8").reshape(n_t, n_x)
    return values, {"x_min": x_min, "dx": dx, "t0": t0, "dt": dt, "version": version}
