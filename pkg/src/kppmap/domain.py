"""Grids, masks, fields, capacity frames and map segmentation.

Arrays are stored with shape ``(ny, nx)``: axis 0 indexes rows (the
``y`` direction), axis 1 indexes columns (the ``x`` direction). Row 0 is
the northernmost row of a map file. Segment bounds are 0-based and
inclusive.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

FIELD_TOL = 1e-6

X_AXIS = "x"
Y_AXIS = "y"


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    dx: float

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError(f"grid must be at least 1x1, got nx={self.nx}, ny={self.ny}")
        if not self.dx > 0:
            raise ValueError(f"grid spacing must be positive, got {self.dx}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    def coords(self, x0: float = 0.0, y0: float = 0.0):
        """Cell-centre coordinates ``(x, y)`` as 1-D arrays."""
        return (x0 + self.dx * np.arange(self.nx), y0 + self.dx * np.arange(self.ny))


def _as_grid_array(grid: GridSpec, values, dtype=np.float64) -> np.ndarray:
    a = np.asarray(values, dtype=dtype)
    if a.ndim == 1 and a.size == grid.nx * grid.ny:
        a = a.reshape(grid.shape)
    if a.shape != grid.shape:
        raise ValueError(f"expected array of shape {grid.shape}, got {a.shape}")
    return np.ascontiguousarray(a)


@dataclass
class Field2D:
    """Population density on a grid."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = _as_grid_array(self.grid, self.values)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")

    @classmethod
    def zeros(cls, grid: GridSpec) -> "Field2D":
        return cls(grid, np.zeros(grid.shape))

    def copy(self) -> "Field2D":
        return Field2D(self.grid, self.values.copy())

    def in_bounds(self, tol: float = FIELD_TOL) -> bool:
        return bool(self.values.min() >= -tol and self.values.max() <= 1.0 + tol)


@dataclass
class CapacityFrame:
    """Scaled carrying capacity at one time: 0 on water, (0, 1] on land."""

    grid: GridSpec
    time: float
    values: np.ndarray

    def __post_init__(self):
        self.values = _as_grid_array(self.grid, self.values)
        if not np.isfinite(self.time):
            raise ValueError(f"frame time must be finite, got {self.time}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("capacity contains non-finite values")
        if self.values.min() < 0.0 or self.values.max() > 1.0:
            raise ValueError(
                f"capacity must lie in [0, 1], got range "
                f"[{self.values.min()}, {self.values.max()}]"
            )

    @classmethod
    def uniform(cls, grid: GridSpec, value: float = 1.0, time: float = 0.0) -> "CapacityFrame":
        return cls(grid, time, np.full(grid.shape, float(value)))

    def mask(self) -> "MapMask":
        return MapMask(self.grid, self.values > 0.0)


@dataclass
class MapMask:
    """Habitable cells (True) versus water (False)."""

    grid: GridSpec
    habitable: np.ndarray

    def __post_init__(self):
        self.habitable = _as_grid_array(self.grid, self.habitable, dtype=bool)

    @classmethod
    def full(cls, grid: GridSpec) -> "MapMask":
        return cls(grid, np.ones(grid.shape, dtype=bool))

    def check_capacity(self, frame: CapacityFrame) -> None:
        """Raise unless ``frame`` is positive exactly on habitable cells."""
        if frame.grid != self.grid:
            raise ValueError(f"frame grid {frame.grid} differs from mask grid {self.grid}")
        bad = (frame.values > 0.0) != self.habitable
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise ValueError(
                f"capacity at t={frame.time} disagrees with mask at row {r}, col {c} "
                f"({np.count_nonzero(bad)} cells)"
            )

    def clean_field(self, u: Field2D) -> Field2D:
        """Zero any population found on water, with a warning."""
        wet = ~self.habitable & (u.values != 0.0)
        if wet.any():
            log.warning("zeroing nonzero population on %d water cells", int(wet.sum()))
            u = Field2D(u.grid, np.where(self.habitable, u.values, 0.0))
        return u


@dataclass(frozen=True)
class Segmentation:
    """Maximal habitable runs of a mask, per row and per column.

    Stored in compressed form: the segments of row ``j`` are
    ``row_starts[row_offsets[j]:row_offsets[j+1]]`` (column indices) with
    matching ``row_ends``; columns likewise hold row indices.
    """

    grid: GridSpec
    row_offsets: np.ndarray
    row_starts: np.ndarray
    row_ends: np.ndarray
    col_offsets: np.ndarray
    col_starts: np.ndarray
    col_ends: np.ndarray

    @property
    def row_counts(self) -> np.ndarray:
        return np.diff(self.row_offsets)

    @property
    def col_counts(self) -> np.ndarray:
        return np.diff(self.col_offsets)

    def segments(self, axis: str, line_index: int) -> list[tuple[int, int]]:
        """Segments of one line: a row for ``axis='x'``, a column for ``'y'``."""
        offsets, starts, ends = self.line_arrays(axis)
        if not 0 <= line_index < len(offsets) - 1:
            raise IndexError(f"{axis}-line {line_index} out of range")
        lo, hi = offsets[line_index], offsets[line_index + 1]
        return list(zip(starts[lo:hi].tolist(), ends[lo:hi].tolist()))

    def line_arrays(self, axis: str):
        if axis == X_AXIS:
            return self.row_offsets, self.row_starts, self.row_ends
        if axis == Y_AXIS:
            return self.col_offsets, self.col_starts, self.col_ends
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")

    @property
    def max_segment_length(self) -> int:
        lengths = np.concatenate([self.row_ends - self.row_starts, self.col_ends - self.col_starts])
        return int(lengths.max()) + 1 if lengths.size else 0

    def cell_count(self, axis: str = X_AXIS) -> int:
        _, starts, ends = self.line_arrays(axis)
        return int(np.sum(ends - starts + 1))


def _runs(mask2d: np.ndarray):
    """Maximal runs of True along axis 1; returns (offsets, starts, ends)."""
    nlines, n = mask2d.shape
    padded = np.zeros((nlines, n + 2), dtype=np.int8)
    padded[:, 1:-1] = mask2d
    d = np.diff(padded, axis=1)
    sl, sc = np.nonzero(d == 1)
    el, ec = np.nonzero(d == -1)
    offsets = np.zeros(nlines + 1, dtype=np.int64)
    np.cumsum(np.bincount(sl, minlength=nlines), out=offsets[1:])
    return offsets, sc.astype(np.int64), (ec - 1).astype(np.int64)


def segment_mask(mask: MapMask) -> Segmentation:
    """Split the habitable cells into maximal row and column runs."""
    hab = mask.habitable
    ro, rs, re = _runs(hab)
    co, cs, ce = _runs(hab.T)
    return Segmentation(mask.grid, ro, rs, re, co, cs, ce)


def _line(values: np.ndarray, axis: str, line_index: int) -> np.ndarray:
    if axis == X_AXIS:
        return values[line_index, :]
    if axis == Y_AXIS:
        return values[:, line_index]
    raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")


def _check_seg(values: np.ndarray, axis: str, line_index: int, seg) -> tuple[int, int]:
    nlines = values.shape[0] if axis == X_AXIS else values.shape[1]
    length = values.shape[1] if axis == X_AXIS else values.shape[0]
    start, end = int(seg[0]), int(seg[1])
    if not 0 <= line_index < nlines:
        raise IndexError(f"{axis}-line {line_index} out of range [0, {nlines})")
    if not 0 <= start <= end < length:
        raise IndexError(f"segment ({start}, {end}) out of range for line length {length}")
    return start, end


def _padded(values, axis, line_index, seg, ghost):
    start, end = _check_seg(values, axis, line_index, seg)
    out = np.full(end - start + 3, ghost, dtype=np.float64)
    out[1:-1] = _line(values, axis, line_index)[start : end + 1]
    return out


def extract_segment(field: Field2D, axis: str, line_index: int, seg) -> np.ndarray:
    """Segment values with one zero ghost cell at each end."""
    return _padded(field.values, axis, line_index, seg, 0.0)


def extract_capacity_segment(frame: CapacityFrame, axis: str, line_index: int, seg) -> np.ndarray:
    """Segment capacities with ghost value 1 at each end."""
    return _padded(frame.values, axis, line_index, seg, 1.0)


def write_segment(field: Field2D, axis: str, line_index: int, seg, padded) -> None:
    """Store the interior of ``padded`` back into ``field`` in place."""
    start, end = _check_seg(field.values, axis, line_index, seg)
    padded = np.asarray(padded)
    if padded.shape != (end - start + 3,):
        raise ValueError(f"padded vector must have length {end - start + 3}")
    _line(field.values, axis, line_index)[start : end + 1] = padded[1:-1]
