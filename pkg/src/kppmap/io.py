"""Plain-text file formats and run configuration.

Grid files: a header line ``nx ny dx`` followed by ``ny`` lines of ``nx``
whitespace-separated values, northernmost row first. Frame manifests
list ``<time> <grid file>`` per line. Run configs are flat
``key = value`` files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .domain import CapacityFrame, Field2D, GridSpec, MapMask
from .reference import FrontTrace, front_velocity

PathLike = Union[str, Path]


class GridFormatError(ValueError):
    """Malformed grid, manifest or config file."""


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def read_grid(path: PathLike):
    """Parse a grid file into ``(GridSpec, values)`` with values shaped ``(ny, nx)``."""
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines()]
    body = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip() and not ln.lstrip().startswith("#")]
    if not body:
        raise GridFormatError(f"{path}: empty file")
    hline, header = body[0]
    parts = header.split()
    try:
        nx, ny, dx = int(parts[0]), int(parts[1]), float(parts[2])
        if len(parts) != 3:
            raise ValueError
    except (ValueError, IndexError):
        raise GridFormatError(f"{path}:{hline}: header must be 'nx ny dx', got {header!r}") from None
    try:
        grid = GridSpec(nx, ny, dx)
    except ValueError as e:
        raise GridFormatError(f"{path}:{hline}: {e}") from None
    rows = body[1:]
    if len(rows) != ny:
        where = rows[ny][0] if len(rows) > ny else (rows[-1][0] if rows else hline)
        raise GridFormatError(f"{path}:{where}: expected {ny} data rows, found {len(rows)}")
    values = np.empty((ny, nx))
    for j, (lineno, ln) in enumerate(rows):
        toks = ln.split()
        if len(toks) != nx:
            raise GridFormatError(f"{path}:{lineno}: expected {nx} values, found {len(toks)}")
        try:
            values[j] = [float(t) for t in toks]
        except ValueError:
            raise GridFormatError(f"{path}:{lineno}: non-numeric value") from None
        if not np.all(np.isfinite(values[j])):
            raise GridFormatError(f"{path}:{lineno}: non-finite value")
    return grid, values


def load_grid_file(path: PathLike, kind: str = "capacity", time: float = 0.0):
    """Load a grid file as a ``CapacityFrame``, ``MapMask`` or ``Field2D``."""
    grid, values = read_grid(path)
    if kind == "mask":
        bad = (values != 0.0) & (values != 1.0)
        if bad.any():
            j = int(np.argwhere(bad)[0][0])
            raise GridFormatError(f"{path}: mask values must be 0 or 1 (data row {j + 1})")
        return MapMask(grid, values == 1.0)
    try:
        if kind == "capacity":
            return CapacityFrame(grid, time, values)
        if kind == "field":
            return Field2D(grid, values)
    except ValueError as e:
        raise GridFormatError(f"{path}: {e}") from None
    raise ValueError(f"unknown grid kind {kind!r}")


def write_grid_file(path: PathLike, grid: GridSpec, values) -> None:
    values = np.asarray(values, dtype=np.float64).reshape(grid.shape)
    out = [f"{grid.nx} {grid.ny} {_fmt(grid.dx)}"]
    for row in values:
        out.append(" ".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(out) + "\n")


def write_mask_file(path: PathLike, mask: MapMask) -> None:
    g = mask.grid
    out = [f"{g.nx} {g.ny} {_fmt(g.dx)}"]
    out += [" ".join("1" if b else "0" for b in row) for row in mask.habitable]
    Path(path).write_text("\n".join(out) + "\n")


def load_frame_manifest(path: PathLike) -> list[CapacityFrame]:
    """Read ``<time> <grid file>`` lines; relative paths resolve against the manifest."""
    path = Path(path)
    frames = []
    for lineno, ln in enumerate(path.read_text().splitlines(), 1):
        if not ln.strip() or ln.lstrip().startswith("#"):
            continue
        parts = ln.split(maxsplit=1)
        if len(parts) != 2:
            raise GridFormatError(f"{path}:{lineno}: expected '<time> <path>'")
        try:
            t = float(parts[0])
        except ValueError:
            raise GridFormatError(f"{path}:{lineno}: bad time {parts[0]!r}") from None
        if not math.isfinite(t):
            raise GridFormatError(f"{path}:{lineno}: non-finite time")
        if frames and not t > frames[-1].time:
            raise GridFormatError(f"{path}:{lineno}: times must be strictly increasing")
        fp = Path(parts[1].strip())
        if not fp.is_absolute():
            fp = path.parent / fp
        frames.append(load_grid_file(fp, "capacity", time=t))
    if not frames:
        raise GridFormatError(f"{path}: no frames listed")
    return frames


@dataclass
class Snapshot:
    time: float
    field: Field2D


def write_snapshot_csv(snapshot: Snapshot, path: PathLike) -> None:
    """Header ``# time=... nx=... ny=... dx=...`` then one comma-separated line per row."""
    g = snapshot.field.grid
    out = [f"# time={_fmt(snapshot.time)} nx={g.nx} ny={g.ny} dx={_fmt(g.dx)}"]
    for row in snapshot.field.values:
        out.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(out) + "\n")


def read_snapshot_csv(path: PathLike) -> Snapshot:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise GridFormatError(f"{path}:1: missing snapshot header")
    try:
        meta = dict(tok.split("=", 1) for tok in lines[0][1:].split())
        grid = GridSpec(int(meta["nx"]), int(meta["ny"]), float(meta["dx"]))
        t = float(meta["time"])
    except (KeyError, ValueError):
        raise GridFormatError(f"{path}:1: bad snapshot header {lines[0]!r}") from None
    rows = [ln for ln in lines[1:] if ln.strip()]
    if len(rows) != grid.ny:
        raise GridFormatError(f"{path}: expected {grid.ny} rows, found {len(rows)}")
    values = np.array([[float(v) for v in ln.split(",")] for ln in rows])
    return Snapshot(t, Field2D(grid, values))


def gray_levels(u, scale: float = 1.0) -> np.ndarray:
    """8-bit display levels ``round(255 log(1 + 10 u/scale) / log 11)``, clipped."""
    v = np.clip(np.asarray(u, dtype=np.float64) / scale, 0.0, 1.0)
    return np.rint(255.0 * np.log1p(10.0 * v) / math.log(11.0)).astype(np.int64)


def write_snapshot_pgm(snapshot: Snapshot, path: PathLike, scale: float = 1.0) -> None:
    """Plain (P2) PGM of the log-scaled density; ``scale`` maps to white."""
    g = snapshot.field.grid
    levels = gray_levels(snapshot.field.values, scale)
    out = ["P2", f"# time={_fmt(snapshot.time)}", f"{g.nx} {g.ny}", "255"]
    out += [" ".join(str(int(v)) for v in row) for row in levels]
    Path(path).write_text("\n".join(out) + "\n")


def read_pgm(path: PathLike) -> np.ndarray:
    toks = [t for ln in Path(path).read_text().splitlines() if not ln.startswith("#") for t in ln.split()]
    if toks[0] != "P2":
        raise GridFormatError(f"{path}: not a plain PGM")
    nx, ny = int(toks[1]), int(toks[2])
    return np.array(toks[4:], dtype=np.int64).reshape(ny, nx)


def write_front_trace(trace: FrontTrace, path: PathLike) -> None:
    """CSV ``t,x_half,velocity``; velocity is blank where no centered difference exists."""
    t = trace.times
    _, v = front_velocity(trace)
    out = ["t,x_half,velocity"]
    for i, (ti, xi) in enumerate(zip(t, trace.positions)):
        vel = _fmt(v[i - 1]) if 0 < i < len(t) - 1 else ""
        out.append(f"{_fmt(ti)},{_fmt(xi)},{vel}")
    Path(path).write_text("\n".join(out) + "\n")


def write_metrics(path: PathLike, metrics: dict) -> None:
    out = []
    for k, v in metrics.items():
        out.append(f"{k} = {_fmt(v) if isinstance(v, float) else v}")
    Path(path).write_text("\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# run configuration


@dataclass
class RunConfig:
    scenario: str
    h: Optional[float] = None
    dx: Optional[float] = None
    beta: float = 4.0
    nu: float = 1.0
    alternate_directions: bool = True
    regularize: bool = True
    smooth: bool = False
    smooth_L: Optional[int] = None
    lam: Optional[float] = None
    c: Optional[float] = None
    pixel_size: Optional[float] = None
    mask: Optional[str] = None
    frames: Optional[str] = None
    capacity: Optional[str] = None
    init: Optional[str] = None
    t_start: float = 0.0
    t_end: Optional[float] = None
    snapshot_every: Optional[float] = None
    out: str = "out"
    nx: Optional[int] = None
    ny: Optional[int] = None
    fr: float = 0.01
    x_L: float = -16.0
    x_H: float = 16.0
    strip_center: float = -30.0
    strip_rms: float = 3.0
    width: float = 3.0
    refine: Optional[int] = None
    margin: float = 5.0

    def validate(self) -> None:
        if self.t_end is not None and not self.t_end > self.t_start:
            raise ValueError(f"t_end ({self.t_end}) must exceed t_start ({self.t_start})")
        if self.snapshot_every is not None and not self.snapshot_every > 0:
            raise ValueError(f"snapshot period must be positive, got {self.snapshot_every}")
        for name in ("h", "dx"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive, got {v}")
        if not self.beta >= 1:
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        if not self.nu > 0:
            raise ValueError(f"nu must be positive, got {self.nu}")
        if self.smooth_L is not None and self.smooth_L < 1:
            raise ValueError(f"smooth_L must be >= 1, got {self.smooth_L}")
        if not 0 < self.fr <= 1:
            raise ValueError(f"fr must lie in (0, 1], got {self.fr}")
        for name in ("mask", "frames", "capacity"):
            p = getattr(self, name)
            if p is not None and not Path(p).is_file():
                raise FileNotFoundError(f"{name} file not found: {p}")


_BOOL = {"1": True, "true": True, "yes": True, "on": True,
         "0": False, "false": False, "no": False, "off": False}


def _coerce(cfg_field, raw: str):
    typ = str(cfg_field.type)
    if "bool" in typ:
        try:
            return _BOOL[raw.lower()]
        except KeyError:
            raise ValueError(f"{cfg_field.name}: expected a boolean, got {raw!r}") from None
    if "int" in typ:
        return int(raw)
    if "float" in typ:
        if "/" in raw:
            num, den = raw.split("/", 1)
            return float(num) / float(den)
        return float(raw)
    return raw


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines into typed RunConfig field values."""
    known = {f.name: f for f in fields(RunConfig)}
    out = {}
    for lineno, ln in enumerate(text.splitlines(), 1):
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        if "=" not in ln:
            raise GridFormatError(f"{source}:{lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in ln.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise GridFormatError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _coerce(known[key], raw)
        except ValueError as e:
            raise GridFormatError(f"{source}:{lineno}: {e}") from None
    return out


def load_config(path: PathLike) -> dict:
    path = Path(path)
    return parse_config_text(path.read_text(), str(path))


def config_to_text(cfg: RunConfig) -> str:
    out = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if v is None:
            continue
        out.append(f"{f.name} = {_fmt(v) if isinstance(v, float) else v}")
    return "\n".join(out) + "\n"
