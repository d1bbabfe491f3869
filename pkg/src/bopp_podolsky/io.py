"""Byte-level formats: field files, JSON sidecars and CSV tables.

Field file layout::

    b"BPFLD01"                      7 bytes magic
    uint32 little-endian            header length in bytes
    UTF-8 JSON header               {version, kind, N, h, p, a, mass, complex, ...}
    float64 little-endian payload   N values, or 2N interleaved re/im if complex
"""
from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .fields import Field
from .grid import RadialGrid

MAGIC = b"BPFLD01"
VERSION = 1
FLOAT_FMT = "%.16e"


class FieldFileError(ValueError):
    pass


class BadMagicError(FieldFileError):
    pass


class TruncatedPayloadError(FieldFileError):
    pass


class LengthMismatchError(FieldFileError):
    pass


class UnsupportedVersionError(FieldFileError):
    pass


def atomic_write_bytes(path, data: bytes) -> None:
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
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


def field_bytes(u: Field, p: float | None = None, a: float | None = None, extra: dict | None = None) -> bytes:
    is_complex = np.iscomplexobj(u.values)
    header = {
        "version": VERSION,
        "kind": u.meta.get("kind", "field"),
        "N": u.grid.N,
        "h": u.grid.h,
        "laplacian": u.grid.laplacian,
        "p": p if p is not None else u.meta.get("p"),
        "a": a if a is not None else u.meta.get("a"),
        "mass": u.mass(),
        "complex": bool(is_complex),
    }
    if extra:
        header.update(extra)
    hb = json.dumps(header, sort_keys=True).encode("utf-8")
    if is_complex:
        payload = np.empty(2 * u.grid.N, dtype="<f8")
        payload[0::2] = u.values.real
        payload[1::2] = u.values.imag
    else:
        payload = np.asarray(u.values, dtype="<f8")
    return MAGIC + struct.pack("<I", len(hb)) + hb + payload.tobytes()


def write_field(u: Field, path, p: float | None = None, a: float | None = None, extra: dict | None = None) -> Path:
    path = Path(path)
    atomic_write_bytes(path, field_bytes(u, p, a, extra))
    return path


def parse_field(data: bytes) -> tuple[Field, dict]:
    if data[: len(MAGIC)] != MAGIC:
        raise BadMagicError("bad magic: not a field file")
    off = len(MAGIC)
    if len(data) < off + 4:
        raise TruncatedPayloadError("truncated payload: header length missing")
    (hlen,) = struct.unpack("<I", data[off: off + 4])
    off += 4
    if len(data) < off + hlen:
        raise TruncatedPayloadError("truncated payload: header cut short")
    try:
        header = json.loads(data[off: off + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FieldFileError(f"unreadable header: {exc}") from exc
    off += hlen
    if header.get("version") != VERSION:
        raise UnsupportedVersionError(f"unsupported version {header.get('version')!r}")
    N = int(header["N"])
    count = 2 * N if header["complex"] else N
    body = data[off:]
    if len(body) < 8 * count:
        raise TruncatedPayloadError(f"truncated payload: expected {8 * count} bytes, got {len(body)}")
    if len(body) > 8 * count:
        raise LengthMismatchError(f"header/payload length mismatch: {len(body) - 8 * count} trailing bytes")
    raw = np.frombuffer(body, dtype="<f8").astype(float)
    values = raw[0::2] + 1j * raw[1::2] if header["complex"] else raw
    grid = RadialGrid(N, float(header["h"]), header.get("laplacian", "spectral"))
    meta = {k: header[k] for k in ("kind", "p", "a") if header.get(k) is not None}
    return Field(grid, values, meta), header


def read_field(path) -> Field:
    return read_field_with_header(path)[0]


def read_field_with_header(path) -> tuple[Field, dict]:
    return parse_field(Path(path).read_bytes())


def write_json(obj, path) -> Path:
    path = Path(path)
    atomic_write_bytes(path, (json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n").encode())
    return path


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT % v
    return v


def csv_bytes(rows: list[dict], columns: list[str] | None = None) -> bytes:
    """CSV with every float in 17-significant-digit scientific notation."""
    columns = columns or (list(rows[0].keys()) if rows else [])
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row.get(c, "")) for c in columns])
    return buf.getvalue().encode()


def write_csv(rows: list[dict], path, columns: list[str] | None = None) -> Path:
    path = Path(path)
    atomic_write_bytes(path, csv_bytes(rows, columns))
    return path


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
