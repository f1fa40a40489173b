"""Deterministic output formats: CSV for 1-D profiles, DFFVGRID for 2-D.

DFFVGRID layout: 8-byte magic "DFFVGRID", little-endian u32 nx, ny,
n_components, then per component a u32 name length plus UTF-8 name, then the
n_components blocks of nx*ny float64 values, row-major with the x index
slowest.  Numeric text output uses 17 significant digits (round-trippable).
"""

from __future__ import annotations

import json
import struct

import numpy as np

__all__ = ["format_float", "write_csv", "write_grid", "read_grid", "write_meta"]

MAGIC = b"DFFVGRID"


def format_float(x) -> str:
    return format(float(x), ".17g")


def write_csv(path, header, columns):
    """Write columns (1-D arrays of equal length) under a header row."""
    columns = [np.asarray(c) for c in columns]
    n = len(columns[0])
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(n):
            fh.write(",".join(format_float(c[i]) for c in columns) + "\n")


def write_grid(path, names, arrays):
    """Write named (nx, ny) float64 arrays in the DFFVGRID layout."""
    arrays = [np.ascontiguousarray(a, dtype="<f8") for a in arrays]
    nx, ny = arrays[0].shape
    for a in arrays:
        if a.shape != (nx, ny):
            raise ValueError("all components must share one shape")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<III", nx, ny, len(arrays)))
        for name in names:
            raw = name.encode("utf-8")
            fh.write(struct.pack("<I", len(raw)))
            fh.write(raw)
        for a in arrays:
            fh.write(a.tobytes(order="C"))


def read_grid(path):
    """Read a DFFVGRID file back as (names, dict name -> (nx, ny) array)."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MAGIC:
            raise ValueError(f"not a DFFVGRID file: magic {magic!r}")
        nx, ny, ncomp = struct.unpack("<III", fh.read(12))
        names = []
        for _ in range(ncomp):
            (ln,) = struct.unpack("<I", fh.read(4))
            names.append(fh.read(ln).decode("utf-8"))
        out = {}
        for name in names:
            buf = fh.read(nx * ny * 8)
            out[name] = np.frombuffer(buf, dtype="<f8").reshape(nx, ny).copy()
    return names, out


def write_meta(path, record):
    with open(path, "w") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")
