"""Scenario runners behind the command-line driver.

Each runner takes a validated :class:`~kppmap.io.RunConfig`, writes its
artifacts into the output directory and returns a :class:`RunSummary`.
Nothing written to disk depends on wall-clock time or thread count.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .capacity import (PhysicalParams, SigmoidSchedule, SmoothingFilter, capacity_at,
                       length_scale, sigmoid_weight, smooth_frame)
from .domain import CapacityFrame, Field2D, GridSpec, MapMask, X_AXIS, Y_AXIS, segment_mask
from .io import (RunConfig, Snapshot, load_frame_manifest, load_grid_file, write_front_trace,
                 write_grid_file, write_metrics, write_snapshot_csv, write_snapshot_pgm)
from .kernels import GodunovStepper, SolverParams, integrate_1d, steps_between
from .reference import (FrontTrace, error_field, error_metrics, asymmetry, front_position,
                        front_velocity, reference_1d, reference_radial)

SCENARIOS = ("wave1d", "radial2d", "desert", "map-run", "segment-debug", "smooth-map",
             "interp-preview")

DEFAULT_SMOOTH_L = 3
SYNTHETIC_NX, SYNTHETIC_NY = 100, 50


class ConfigError(ValueError):
    """Invalid scenario parameters, detected before any computation."""


@dataclass
class RunSummary:
    t_final: float
    u_min: float
    u_max: float
    steps: int
    files: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# initial conditions


def centered_coords(grid: GridSpec):
    """Cell coordinates with the origin at the grid centre and y pointing north."""
    x = grid.dx * (np.arange(grid.nx) - 0.5 * (grid.nx - 1))
    y = grid.dx * (0.5 * (grid.ny - 1) - np.arange(grid.ny))
    return x, y


def gaussian_strip(x, center: float, rms: float) -> np.ndarray:
    """Unit-height Gaussian profile whose RMS width about ``center`` is ``rms``."""
    return np.exp(-((np.asarray(x) - center) ** 2) / (2.0 * rms * rms))


def _parse_shape(spec: str) -> tuple[str, dict]:
    kind, _, rest = spec.partition(":")
    opts = {}
    for tok in filter(None, (t.strip() for t in rest.split(","))):
        key, eq, val = tok.partition("=")
        if not eq:
            raise ConfigError(f"bad initial-condition option {tok!r} in {spec!r}")
        try:
            opts[key.strip()] = float(val)
        except ValueError:
            raise ConfigError(f"bad number {val!r} in {spec!r}") from None
    return kind.strip(), opts


_SHAPES = {"zero": set(), "gauss": {"x", "y", "w"}, "strip": {"x", "w"},
           "disk": {"x", "y", "r"}, "point": {"row", "col"}}


def initial_field(spec: Optional[str], grid: GridSpec, default: str = "zero") -> Field2D:
    """Built-in shape (``zero``, ``gauss:x=,y=,w=``, ``strip:x=,w=``,
    ``disk:x=,y=,r=``, ``point:row=,col=``) or a grid file path.

    Shape coordinates are centred on the grid; point seeds use 0-based
    pixel indices.
    """
    spec = spec or default
    kind, opts = _parse_shape(spec)
    if kind not in _SHAPES:
        if Path(spec).is_file():
            u = load_grid_file(spec, "field")
            if u.grid.shape != grid.shape:
                raise ConfigError(f"initial field {spec} has shape {u.grid.shape}, run grid {grid.shape}")
            return Field2D(grid, u.values)
        raise ConfigError(f"unknown initial condition {spec!r}")
    unknown = set(opts) - _SHAPES[kind]
    if unknown:
        raise ConfigError(f"unknown options {sorted(unknown)} for {kind!r}")
    x, y = centered_coords(grid)
    X, Y = np.meshgrid(x, y)
    if kind == "zero":
        vals = np.zeros(grid.shape)
    elif kind == "gauss":
        w = opts.get("w", 3.0)
        vals = gaussian_strip(X, opts.get("x", 0.0), w) * gaussian_strip(Y, opts.get("y", 0.0), w)
    elif kind == "strip":
        vals = gaussian_strip(X, opts.get("x", 0.0), opts.get("w", 3.0))
    elif kind == "disk":
        r = opts.get("r", 3.0)
        vals = (np.hypot(X - opts.get("x", 0.0), Y - opts.get("y", 0.0)) <= r).astype(float)
    else:
        row = int(opts.get("row", grid.ny // 2))
        col = int(opts.get("col", grid.nx // 2))
        if not (0 <= row < grid.ny and 0 <= col < grid.nx):
            raise ConfigError(f"point seed ({row}, {col}) outside the {grid.ny}x{grid.nx} grid")
        vals = np.zeros(grid.shape)
        vals[row, col] = 1.0
    return Field2D(grid, vals)


# ---------------------------------------------------------------------------
# synthetic map used when no files are given


def synthetic_map(nx: int = SYNTHETIC_NX, ny: int = SYNTHETIC_NY, dx: float = 0.5):
    """Deterministic mask and two capacity frames (t = 0 and t = 20).

    An elliptical continent with an inland lake and a narrow strait to a
    small island; capacity drifts from west-rich to east-rich.
    """
    grid = GridSpec(nx, ny, dx)
    j, i = np.mgrid[0:ny, 0:nx]
    cx, cy = 0.45 * nx, 0.5 * ny
    land = ((i - cx) / (0.4 * nx)) ** 2 + ((j - cy) / (0.42 * ny)) ** 2 <= 1.0
    lake = ((i - 0.4 * nx) / (0.08 * nx)) ** 2 + ((j - 0.45 * ny) / (0.12 * ny)) ** 2 <= 1.0
    island = ((i - 0.9 * nx) / (0.06 * nx)) ** 2 + ((j - 0.3 * ny) / (0.16 * ny)) ** 2 <= 1.0
    strait = (j == int(0.3 * ny)) & (i >= int(0.8 * nx)) & (i <= int(0.9 * nx))
    hab = (land & ~lake) | island | strait
    mask = MapMask(grid, hab)
    s = i / (nx - 1)
    k0 = np.where(hab, 0.2 + 0.8 * (1.0 - s), 0.0)
    k1 = np.where(hab, 0.2 + 0.8 * s, 0.0)
    frames = [CapacityFrame(grid, 0.0, k0), CapacityFrame(grid, 20.0, k1)]
    return mask, frames


# ---------------------------------------------------------------------------
# helpers


def _pick(value, default):
    return default if value is None else value


def _snapshot_stride(period: Optional[float], h: float, nsteps: int) -> int:
    if period is None:
        return max(nsteps, 1)
    return max(1, int(round(period / h)))


class _SnapshotWriter:
    def __init__(self, out: Path, grid: GridSpec, pgm: bool = False, scale: float = 1.0):
        self.out, self.grid, self.pgm, self.scale = out, grid, pgm, scale
        self.count = 0
        self.files: list[Path] = []

    def __call__(self, t: float, values: np.ndarray) -> None:
        snap = Snapshot(t, Field2D(self.grid, values.reshape(self.grid.shape)))
        path = self.out / f"snap_{self.count:05d}.csv"
        write_snapshot_csv(snap, path)
        self.files.append(path)
        if self.pgm:
            pp = path.with_suffix(".pgm")
            write_snapshot_pgm(snap, pp, self.scale)
            self.files.append(pp)
        self.count += 1


def _params(cfg: RunConfig, h: float, dx: float) -> SolverParams:
    try:
        return SolverParams(h=h, dx=dx, beta=cfg.beta,
                            alternate_directions=cfg.alternate_directions,
                            regularize=cfg.regularize)
    except ValueError as e:
        raise ConfigError(str(e)) from None


def _nsteps(t0: float, t1: float, h: float) -> int:
    try:
        return steps_between(t0, t1, h)
    except ValueError as e:
        raise ConfigError(str(e)) from None


# ---------------------------------------------------------------------------
# wave1d


def run_wave1d(cfg: RunConfig, out: Path) -> RunSummary:
    """Travelling front on a line; front trace and reference comparison."""
    h, dx = _pick(cfg.h, 0.2), _pick(cfg.dx, 0.2)
    nx = _pick(cfg.nx, 801)
    t0, t1 = cfg.t_start, _pick(cfg.t_end, 30.0)
    params = _params(cfg, h, dx)
    nsteps = _nsteps(t0, t1, h)
    grid = GridSpec(nx, 1, dx)
    u0 = initial_field(cfg.init, grid, default=f"strip:x=0,w={cfg.width!r}").values[0]
    x0 = -0.5 * (nx - 1) * dx
    stride = _snapshot_stride(_pick(cfg.snapshot_every, 10.0), h, nsteps)
    snaps = _SnapshotWriter(out, grid)
    snaps(t0, u0)
    trace = FrontTrace()
    kept = {}
    n_done = [0]

    def on_step(t, u):
        n_done[0] += 1
        n = n_done[0]
        xh = front_position(u, 1.0, dx, x0)
        if xh is not None:
            trace.append(t, xh)
        if n % stride == 0 or n == nsteps:
            snaps(t, u)
            kept[t] = u.copy()

    u = integrate_1d(u0, params, t1, t0, on_step=on_step)
    files = list(snaps.files)
    tp = out / "front_trace.csv"
    write_front_trace(trace, tp)
    files.append(tp)
    metrics = {"steps": nsteps}
    tc, v = front_velocity(trace, (10.0, 30.0))
    if v.size:
        metrics["mean_velocity_10_30"] = float(v.mean())
    if cfg.init is None:
        w = cfg.width
        init = lambda xx: gaussian_strip(xx + x0, 0.0, w)  # noqa: E731
    else:
        init = u0.copy()
    if t0 == 0.0:
        for t, snap in kept.items():
            ref = reference_1d(init, params, t, _pick(cfg.refine, 4), n=nx)
            metrics[f"rms_vs_reference_t{t:g}"] = float(np.sqrt(np.mean((snap - ref) ** 2)))
    mp = out / "metrics.txt"
    write_metrics(mp, metrics)
    files.append(mp)
    return RunSummary(t1, float(u.min()), float(u.max()), nsteps, files, metrics)


# ---------------------------------------------------------------------------
# radial2d


def radial_reference_for(cfg: RunConfig, params: SolverParams, grid: GridSpec, t_end: float):
    """Radial reference matching the default Gaussian bump at the grid centre."""
    c = 0.5 * (grid.nx - 1) * grid.dx
    nr = int(math.ceil(c * math.sqrt(2.0) / grid.dx)) + 3
    w = cfg.width
    return reference_radial(lambda r: gaussian_strip(r, 0.0, w), params, t_end, _pick(cfg.refine, 8), nr=nr)


def run_radial2d(cfg: RunConfig, out: Path) -> RunSummary:
    """Radially symmetric bump on a square; writes error metrics against the radial reference."""
    h, dx = _pick(cfg.h, 0.1), _pick(cfg.dx, 0.2)
    nx = _pick(cfg.nx, 401)
    ny = _pick(cfg.ny, nx)
    if nx != ny:
        raise ConfigError("radial2d needs a square grid")
    if nx % 2 == 0:
        raise ConfigError("radial2d needs an odd grid size so the centre is a node")
    t0, t1 = cfg.t_start, _pick(cfg.t_end, 20.0)
    if t0 != 0.0:
        raise ConfigError("radial2d starts at t = 0")
    params = _params(cfg, h, dx)
    nsteps = _nsteps(t0, t1, h)
    grid = GridSpec(nx, ny, dx)
    if cfg.init is not None:
        raise ConfigError("radial2d uses its built-in Gaussian bump; set width instead of init")
    u = initial_field(f"gauss:x=0,y=0,w={cfg.width!r}", grid).values
    stepper = GodunovStepper(segment_mask(MapMask.full(grid)), params)
    stride = _snapshot_stride(cfg.snapshot_every, h, nsteps)
    snaps = _SnapshotWriter(out, grid, pgm=True)
    snaps(t0, u)

    def on_step(n, t, values):
        if n % stride == 0 or n == nsteps:
            snaps(t, values)

    stepper.integrate(u, t0, t1, on_step=on_step)
    files = list(snaps.files)
    ref = radial_reference_for(cfg, params, grid, t1)
    centre = (0.5 * (nx - 1) * dx,) * 2
    f = Field2D(grid, u)
    rms, mx = error_metrics(f, ref, centre)
    e = error_field(f, ref, centre)
    metrics = {"steps": nsteps, "eps_rms": rms, "eps_max": mx, "asymmetry": asymmetry(e)}
    ep = out / "error_field.txt"
    write_grid_file(ep, grid, e)
    mp = out / "metrics.txt"
    write_metrics(mp, metrics)
    files += [ep, mp]
    return RunSummary(t1, float(u.min()), float(u.max()), nsteps, files, metrics)


# ---------------------------------------------------------------------------
# desert


def desert_scenario_builder(f_r: float = 0.01, x_L: float = -16.0, x_H: float = 16.0,
                            strip_center: float = -30.0, strip_rms: float = 3.0) -> RunConfig:
    """Config for a front crossing a band ``x_L <= x <= x_H`` of capacity ``f_r``."""
    if not 0 < f_r <= 1:
        raise ConfigError(f"f_r must lie in (0, 1], got {f_r}")
    if not x_L < x_H:
        raise ConfigError(f"need x_L < x_H, got {x_L}, {x_H}")
    if not strip_rms > 0:
        raise ConfigError(f"strip width must be positive, got {strip_rms}")
    return RunConfig(scenario="desert", h=1.0 / 8.0, dx=0.4, nx=201, ny=101, t_end=40.0,
                     fr=f_r, x_L=x_L, x_H=x_H, strip_center=strip_center, strip_rms=strip_rms)


def desert_capacity(cfg: RunConfig, grid: GridSpec) -> np.ndarray:
    x, _ = centered_coords(grid)
    eps = 1e-9 * grid.dx
    inside = (x >= cfg.x_L - eps) & (x <= cfg.x_H + eps)
    return np.repeat(np.where(inside, cfg.fr, 1.0)[None, :], grid.ny, axis=0)


def desert_velocity_check(trace: FrontTrace, cfg: RunConfig, rel_tol: float = 0.05):
    """Velocity samples whose position lies more than ``cfg.margin`` from the
    desert walls and the initial strip; returns ``(positions, velocities, ok)``.
    """
    t = np.asarray(trace.times)
    x = np.asarray(trace.positions)
    if t.size < 3:
        return np.empty(0), np.empty(0), False
    v = (x[2:] - x[:-2]) / (t[2:] - t[:-2])
    xc = x[1:-1]
    m = cfg.margin
    keep = np.ones(xc.size, dtype=bool)
    keep &= xc > cfg.strip_center + cfg.strip_rms + m
    for wall in (cfg.x_L, cfg.x_H):
        keep &= np.abs(xc - wall) > m
    xs, vs = xc[keep], v[keep]
    ok = bool(vs.size) and bool(np.all(np.abs(vs / math.sqrt(2.0) - 1.0) <= rel_tol))
    return xs, vs, ok


def run_desert(cfg: RunConfig, out: Path) -> RunSummary:
    """Front crossing a low-capacity band; centreline half-height trace."""
    base = desert_scenario_builder(cfg.fr, cfg.x_L, cfg.x_H, cfg.strip_center, cfg.strip_rms)
    h, dx = _pick(cfg.h, base.h), _pick(cfg.dx, base.dx)
    nx, ny = _pick(cfg.nx, base.nx), _pick(cfg.ny, base.ny)
    t0, t1 = cfg.t_start, _pick(cfg.t_end, base.t_end)
    params = _params(cfg, h, dx)
    nsteps = _nsteps(t0, t1, h)
    grid = GridSpec(nx, ny, dx)
    K = desert_capacity(cfg, grid)
    default_init = f"strip:x={cfg.strip_center!r},w={cfg.strip_rms!r}"
    u = initial_field(cfg.init, grid, default=default_init).values
    u = np.minimum(u, K)
    x, _ = centered_coords(grid)
    row = ny // 2
    stepper = GodunovStepper(segment_mask(MapMask.full(grid)), params)
    stride = _snapshot_stride(_pick(cfg.snapshot_every, 10.0), h, nsteps)
    snaps = _SnapshotWriter(out, grid, pgm=True)
    snaps(t0, u)
    trace = FrontTrace()
    lowest = [float(u.min())]

    def on_step(n, t, values):
        lowest[0] = min(lowest[0], float(values.min()))
        xh = front_position(values[row], K[row], dx, x[0])
        if xh is not None:
            trace.append(t, xh, float(np.interp(xh, x, K[row])))
        if n % stride == 0 or n == nsteps:
            snaps(t, values)

    stepper.integrate(u, t0, t1, capacity=lambda t: K, on_step=on_step)
    files = list(snaps.files)
    tp = out / "front_trace.csv"
    write_front_trace(trace, tp)
    xs, vs, ok = desert_velocity_check(trace, cfg)
    metrics = {"steps": nsteps, "min_u_over_run": lowest[0],
               "velocity_samples_checked": int(vs.size),
               "max_rel_velocity_error": float(np.max(np.abs(vs / math.sqrt(2) - 1))) if vs.size else float("nan"),
               "velocity_within_5pct": ok}
    mp = out / "metrics.txt"
    write_metrics(mp, metrics)
    files += [tp, mp]
    return RunSummary(t1, float(u.min()), float(u.max()), nsteps, files, metrics)


# ---------------------------------------------------------------------------
# map-based scenarios


def _load_map(cfg: RunConfig, need_frames: bool = True):
    """Mask and capacity frames from files, falling back to the synthetic map."""
    syn_mask, syn_frames = synthetic_map()
    frames = None
    if cfg.frames is not None:
        frames = load_frame_manifest(cfg.frames)
    elif cfg.capacity is not None:
        frames = [load_grid_file(cfg.capacity, "capacity", time=cfg.t_start)]
    if cfg.mask is not None:
        mask = load_grid_file(cfg.mask, "mask")
    elif frames is not None:
        mask = frames[0].mask()
    else:
        mask = syn_mask
    if frames is None:
        if mask.grid != syn_mask.grid and need_frames:
            raise ConfigError("a mask file needs capacity frames (frames or capacity)")
        frames = syn_frames if mask.grid == syn_mask.grid else []
    for fr in frames:
        try:
            mask.check_capacity(fr)
        except ValueError as e:
            raise ConfigError(str(e)) from None
    return mask, frames


def _maybe_smooth(cfg: RunConfig, mask: MapMask, frames):
    if not (cfg.smooth or cfg.smooth_L is not None):
        return frames
    filt = SmoothingFilter(_pick(cfg.smooth_L, DEFAULT_SMOOTH_L))
    return [smooth_frame(f, mask, filt) for f in frames]


def _map_scaling(cfg: RunConfig, grid: GridSpec):
    """Grid spacing and time factor; physical parameters rescale both."""
    if cfg.lam is not None or cfg.c is not None or cfg.pixel_size is not None:
        if None in (cfg.lam, cfg.c, cfg.pixel_size):
            raise ConfigError("physical scaling needs lam, c and pixel_size together")
        try:
            p = PhysicalParams(cfg.lam, cfg.c, cfg.pixel_size)
        except ValueError as e:
            raise ConfigError(str(e)) from None
        return length_scale(p) * p.pixel_size, p.lam
    return _pick(cfg.dx, grid.dx), 1.0


def run_map(cfg: RunConfig, out: Path) -> RunSummary:
    """Population spreading over a masked map with time-interpolated capacity."""
    mask, frames = _load_map(cfg)
    frames = _maybe_smooth(cfg, mask, frames)
    dx, tscale = _map_scaling(cfg, mask.grid)
    grid = GridSpec(mask.grid.nx, mask.grid.ny, dx)
    frames = [CapacityFrame(grid, f.time * tscale, f.values) for f in frames]
    schedule = SigmoidSchedule(frames, cfg.nu)
    h = _pick(cfg.h, 0.25) * tscale
    t0 = cfg.t_start * tscale if cfg.t_start else schedule.t_first
    t1 = _pick(cfg.t_end, None)
    t1 = t1 * tscale if t1 is not None else schedule.t_last
    if len(frames) > 1 and not (schedule.t_first <= t0 < t1 <= schedule.t_last + 1e-9 * abs(t1)):
        raise ConfigError(f"run interval [{t0}, {t1}] outside frame times "
                          f"[{schedule.t_first}, {schedule.t_last}]")
    if not t1 > t0:
        raise ConfigError(f"t_end ({t1}) must exceed t_start ({t0})")
    params = _params(cfg, h, dx)
    nsteps = _nsteps(t0, t1, h)
    seg = segment_mask(mask)
    if cfg.init is None:
        hab = np.argwhere(mask.habitable)
        centre = np.array([grid.ny / 2.0, grid.nx / 2.0])
        r, c = hab[np.argmin(np.sum((hab - centre) ** 2, axis=1))]
        init = f"point:row={r},col={c}"
    else:
        init = cfg.init
    u0 = initial_field(init, grid)
    if not np.any(u0.values[mask.habitable]):
        raise ConfigError("initial population lies entirely on water")
    u = mask.clean_field(u0).values.copy()

    def cap(t):
        t = min(max(t, schedule.t_first), schedule.t_last)
        return capacity_at(schedule, t).values

    stepper = GodunovStepper(seg, params)
    stride = _snapshot_stride(_pick(cfg.snapshot_every, (t1 - t0) / 4.0), h, nsteps)
    snaps = _SnapshotWriter(out, grid, pgm=True)
    snaps(t0, u)

    def on_step(n, t, values):
        if n % stride == 0 or n == nsteps:
            snaps(t, values)

    stepper.integrate(u, t0, t1, capacity=cap, on_step=on_step)
    metrics = {"steps": nsteps, "habitable_cells": int(mask.habitable.sum()),
               "row_segments": int(seg.row_offsets[-1]), "col_segments": int(seg.col_offsets[-1]),
               "total_population": float(u.sum())}
    mp = out / "metrics.txt"
    write_metrics(mp, metrics)
    return RunSummary(t1, float(u.min()), float(u.max()), nsteps, snaps.files + [mp], metrics)


def run_segment_debug(cfg: RunConfig, out: Path) -> RunSummary:
    """List every row and column segment of the mask (0-based inclusive bounds)."""
    mask, _ = _load_map(cfg, need_frames=False)
    seg = segment_mask(mask)
    lines = ["axis,line,start,end"]
    for axis in (X_AXIS, Y_AXIS):
        offsets, _, _ = seg.line_arrays(axis)
        for li in range(len(offsets) - 1):
            for s, e in seg.segments(axis, li):
                lines.append(f"{axis},{li},{s},{e}")
    sp = out / "segments.csv"
    sp.write_text("\n".join(lines) + "\n")
    # label each cell with its row-segment index, cycling through letters
    label = np.full(mask.grid.shape, ".", dtype="<U1")
    letters = "abcdefghijklmnopqrstuvwxyz"
    for j in range(mask.grid.ny):
        for q, (s, e) in enumerate(seg.segments(X_AXIS, j)):
            label[j, s : e + 1] = letters[q % 26]
    ap = out / "row_segments.txt"
    ap.write_text("\n".join("".join(r) for r in label) + "\n")
    metrics = {"row_segments": int(seg.row_offsets[-1]), "col_segments": int(seg.col_offsets[-1]),
               "max_segment_length": seg.max_segment_length}
    mp = out / "metrics.txt"
    write_metrics(mp, metrics)
    return RunSummary(0.0, 0.0, 0.0, 0, [sp, ap, mp], metrics)


def run_smooth_map(cfg: RunConfig, out: Path) -> RunSummary:
    """Smooth the first capacity frame and write before/after grids and images."""
    mask, frames = _load_map(cfg)
    frame = frames[0]
    filt = SmoothingFilter(_pick(cfg.smooth_L, DEFAULT_SMOOTH_L))
    sm = smooth_frame(frame, mask, filt)
    files = []
    for name, f in (("capacity", frame), ("smoothed", sm)):
        gp = out / f"{name}.txt"
        write_grid_file(gp, f.grid, f.values)
        pp = out / f"{name}.pgm"
        write_snapshot_pgm(Snapshot(f.time, Field2D(f.grid, f.values)), pp)
        files += [gp, pp]
    metrics = {"L": filt.L, "max_abs_change": float(np.max(np.abs(sm.values - frame.values)))}
    mp = out / "metrics.txt"
    write_metrics(mp, metrics)
    files.append(mp)
    return RunSummary(frame.time, float(sm.values.min()), float(sm.values.max()), 0, files, metrics)


def run_interp_preview(cfg: RunConfig, out: Path, samples: int = 101) -> RunSummary:
    """Tabulate the blend weight over one unit interval for the configured exponent."""
    ts = np.linspace(0.0, 1.0, samples)
    S = [sigmoid_weight(float(t), 0.0, 1.0, cfg.nu) for t in ts]
    lines = ["t,S"] + [f"{t!r},{s!r}" for t, s in zip(ts.tolist(), S)]
    p = out / "sigmoid.csv"
    p.write_text("\n".join(lines) + "\n")
    return RunSummary(1.0, min(S), max(S), 0, [p], {"nu": cfg.nu})


RUNNERS = {
    "wave1d": run_wave1d,
    "radial2d": run_radial2d,
    "desert": run_desert,
    "map-run": run_map,
    "segment-debug": run_segment_debug,
    "smooth-map": run_smooth_map,
    "interp-preview": run_interp_preview,
}


def run_scenario(cfg: RunConfig) -> RunSummary:
    """Validate ``cfg``, create the output directory and run the scenario."""
    if cfg.scenario not in RUNNERS:
        raise ConfigError(f"unknown scenario {cfg.scenario!r}; choose from {', '.join(SCENARIOS)}")
    try:
        cfg.validate()
    except (ValueError, FileNotFoundError) as e:
        raise ConfigError(str(e)) from None
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return RUNNERS[cfg.scenario](cfg, out)


def with_overrides(cfg: RunConfig, **changes) -> RunConfig:
    return dataclasses.replace(cfg, **{k: v for k, v in changes.items() if v is not None})
