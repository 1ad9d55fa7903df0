"""Binary snapshot persistence for graph fields.

Layout (little-endian throughout):

    bytes 0..3    magic "GNLS"
    u32           format version (currently 1)
    u32           number of edges
    u64           samples per edge
    f64           grid spacing dx
    payload       per edge, n_points complex128 samples stored as
                  interleaved (re, im) float64 pairs

Round-trips are bit-exact.  Malformed files raise distinct error types so
callers can tell truncation from version skew from size mismatches.
"""

from __future__ import annotations

import struct

import numpy as np

from .graph import GraphField, GridSpec

__all__ = [
    "CheckpointError",
    "CorruptHeaderError",
    "VersionMismatchError",
    "ShapeMismatchError",
    "FORMAT_VERSION",
    "save_field",
    "load_field",
]

MAGIC = b"GNLS"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIQd")


class CheckpointError(Exception):
    """Base class for snapshot file problems."""


class CorruptHeaderError(CheckpointError):
    """File too short or magic bytes wrong."""


class VersionMismatchError(CheckpointError):
    """Header carries a format version this code does not read."""


class ShapeMismatchError(CheckpointError):
    """Header shape disagrees with the payload size or is unusable."""


def save_field(field: GraphField, path) -> None:
    """Write the field to path in the snapshot format above."""
    n_edges, n_points = field.edges.shape
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, n_edges, n_points, field.grid.dx)
    payload = np.ascontiguousarray(field.edges, dtype="<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def load_field(path) -> GraphField:
    """Read a snapshot back into a GraphField; inverse of save_field."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise CorruptHeaderError(f"file holds {len(raw)} bytes, header needs {_HEADER.size}")
    magic, version, n_edges, n_points, dx = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise CorruptHeaderError(f"bad magic bytes {magic!r}")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"file version {version}, reader supports {FORMAT_VERSION}")
    if n_edges != 3:
        raise ShapeMismatchError(f"expected 3 edges, header says {n_edges}")
    expected = _HEADER.size + 16 * n_edges * n_points
    if len(raw) != expected:
        raise ShapeMismatchError(
            f"payload size {len(raw) - _HEADER.size} bytes does not match "
            f"header shape ({n_edges} x {n_points} complex samples)"
        )
    if not np.isfinite(dx) or dx <= 0.0 or n_points < 16:
        raise ShapeMismatchError(f"unusable grid in header: dx = {dx}, n_points = {n_points}")
    data = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size).reshape(n_edges, n_points)
    grid = GridSpec(dx=dx, n_points=int(n_points))
    return GraphField(grid, data.astype(np.complex128))
