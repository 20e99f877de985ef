"""Carrying-capacity preparation.

Conversion of physical growth/diffusion parameters to the scaled
equation, low-pass smoothing of capacity maps, and smooth time
interpolation between capacity frames.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .domain import CapacityFrame, MapMask


@dataclass(frozen=True)
class PhysicalParams:
    """Growth rate ``lam`` (1/time), diffusion ``c`` (area/time), pixel size (length)."""

    lam: float
    c: float
    pixel_size: float

    def __post_init__(self):
        for name in ("lam", "c", "pixel_size"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class ScaledQuantities:
    dx: float
    h: float
    extent: float


def length_scale(p: PhysicalParams) -> float:
    """Factor taking physical lengths to scaled ones."""
    return math.sqrt(p.lam / (2.0 * p.c))


def scale_to_dimensionless(p: PhysicalParams, physical_dt: float,
                           physical_extent: float = 0.0) -> ScaledQuantities:
    """Scaled grid spacing, time step and extent.

    Lengths scale by ``sqrt(lam / (2 c))`` and times by ``lam``.
    """
    if not physical_dt > 0:
        raise ValueError(f"time step must be positive, got {physical_dt}")
    if physical_extent < 0:
        raise ValueError(f"extent must be non-negative, got {physical_extent}")
    s = length_scale(p)
    return ScaledQuantities(dx=s * p.pixel_size, h=p.lam * physical_dt, extent=s * physical_extent)


@dataclass(frozen=True)
class SmoothingFilter:
    """Separable window ``(1 - (i/L)^2)(1 - (j/L)^2)`` over ``|i|, |j| < L``."""

    L: int

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise ValueError(f"filter half-width must be an integer >= 1, got {self.L}")

    def weights(self) -> np.ndarray:
        off = np.arange(-self.L + 1, self.L)
        w1 = 1.0 - (off / self.L) ** 2
        return np.outer(w1, w1)


def smooth_frame(frame: CapacityFrame, mask: MapMask, filt: SmoothingFilter) -> CapacityFrame:
    """Weight-normalized local average of the capacity over habitable neighbours.

    Water neighbours and rows beyond the top/bottom edge are skipped;
    columns wrap around (periodic longitude). Water stays exactly 0.
    """
    if frame.grid != mask.grid:
        raise ValueError("frame and mask grids differ")
    ny, nx = frame.grid.shape
    hab = mask.habitable
    vals = np.where(hab, frame.values, 0.0)
    acc = np.zeros((ny, nx))
    wsum = np.zeros((ny, nx))
    w = filt.weights()
    L = filt.L
    for a, dj in enumerate(range(-L + 1, L)):
        # rows r + dj outside [0, ny) contribute nothing
        r0, r1 = max(0, -dj), min(ny, ny - dj)
        if r0 >= r1:
            continue
        src_v = vals[r0 + dj : r1 + dj]
        src_h = hab[r0 + dj : r1 + dj]
        for b, di in enumerate(range(-L + 1, L)):
            wt = w[a, b]
            if wt == 0.0:
                continue
            shifted_v = np.roll(src_v, -di, axis=1)
            shifted_h = np.roll(src_h, -di, axis=1)
            acc[r0:r1] += wt * shifted_v
            wsum[r0:r1] += wt * shifted_h
    out = np.zeros((ny, nx))
    np.divide(acc, wsum, out=out, where=hab)
    return CapacityFrame(frame.grid, frame.time, out)


def sigmoid_weight(t: float, t_L: float, t_H: float, nu: float = 1.0) -> float:
    """Blend weight S(z(t)) rising smoothly from 0 at ``t_L`` to 1 at ``t_H``.

    ``z = (2 dT s - dT^2) / (s (dT - s))^nu`` with ``s = t - t_L`` and
    ``S(z) = 1 / (1 + exp(-z))``. The endpoints are returned exactly.
    """
    if not t_L < t_H:
        raise ValueError(f"need t_L < t_H, got {t_L}, {t_H}")
    if not nu > 0:
        raise ValueError(f"exponent must be positive, got {nu}")
    if not t_L <= t <= t_H:
        raise ValueError(f"t={t} outside [{t_L}, {t_H}]")
    if t == t_L:
        return 0.0
    if t == t_H:
        return 1.0
    dT = t_H - t_L
    s = t - t_L
    denom = (s * (dT - s)) ** nu
    if denom == 0.0:
        return 0.0 if s < 0.5 * dT else 1.0
    z = (2.0 * dT * s - dT * dT) / denom
    return 0.5 * (1.0 + math.tanh(0.5 * z))


@dataclass
class SigmoidSchedule:
    """Time-ordered capacity frames blended pairwise with :func:`sigmoid_weight`."""

    frames: Sequence[CapacityFrame]
    nu: float = 1.0
    times: list = field(init=False, repr=False)

    def __post_init__(self):
        self.frames = list(self.frames)
        if not self.frames:
            raise ValueError("schedule needs at least one frame")
        if not self.nu > 0:
            raise ValueError(f"exponent must be positive, got {self.nu}")
        grid = self.frames[0].grid
        for f in self.frames[1:]:
            if f.grid != grid:
                raise ValueError("all frames must share one grid")
        self.times = [f.time for f in self.frames]
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError(f"frame times must be strictly increasing, got {self.times}")

    @property
    def grid(self):
        return self.frames[0].grid

    @property
    def t_first(self) -> float:
        return self.times[0]

    @property
    def t_last(self) -> float:
        return self.times[-1]


def capacity_at(schedule: SigmoidSchedule, t: float) -> CapacityFrame:
    """Capacity at time ``t``; stored frames are returned as-is at their own times."""
    frames, times = schedule.frames, schedule.times
    if len(frames) == 1:
        return frames[0]
    if not times[0] <= t <= times[-1]:
        raise ValueError(f"t={t} outside schedule range [{times[0]}, {times[-1]}]")
    i = bisect.bisect_left(times, t)
    if times[i] == t:
        return frames[i]
    lo, hi = frames[i - 1], frames[i]
    S = sigmoid_weight(t, lo.time, hi.time, schedule.nu)
    vals = lo.values + S * (hi.values - lo.values)
    # keep rounding from leaving the bracket spanned by the two frames
    np.clip(vals, np.minimum(lo.values, hi.values), np.maximum(lo.values, hi.values), out=vals)
    return CapacityFrame(lo.grid, t, vals)
