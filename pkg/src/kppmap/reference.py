"""Fine-grid reference solutions and validation metrics.

The reference solvers integrate the scaled equation
``u_t = (1 - u) u + 1/2 lap(u)`` with forward Euler on a grid refined by
an integer factor, in 1-D and for radially symmetric 2-D problems, and
sample the result back onto the coarse nodes. They share no code with
the split solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from numba import njit

from .domain import Field2D

EXPLICIT_K_LIMIT = 0.25
DEFAULT_K = 0.2
MIN_REFINE = 4


class ParameterError(ValueError):
    """Reference-solver parameters violate the explicit stability bound."""


@dataclass
class RadialField:
    """Samples ``u(r_i)`` at ``r_i = i * dr``; ``u = 0`` is imposed at ``r = nr * dr``."""

    nr: int
    dr: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.nr < 3 or self.values.shape != (self.nr,):
            raise ValueError(f"radial field needs nr >= 3 values, got {self.values.shape}")
        if not self.dr > 0:
            raise ValueError(f"radial spacing must be positive, got {self.dr}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("radial field contains non-finite values")

    @property
    def r(self) -> np.ndarray:
        return self.dr * np.arange(self.nr)

    def at(self, r) -> np.ndarray:
        """Linear interpolation in r; zero beyond the outer boundary."""
        rr = np.append(self.r, self.nr * self.dr)
        uu = np.append(self.values, 0.0)
        return np.interp(r, rr, uu, right=0.0)


@dataclass
class FrontTrace:
    """Half-height front positions over time."""

    times: list = field(default_factory=list)
    positions: list = field(default_factory=list)
    levels: list = field(default_factory=list)

    def append(self, t: float, x_half: float, k_local: float = 1.0) -> None:
        if self.times and not t > self.times[-1]:
            raise ValueError(f"trace times must increase: {t} after {self.times[-1]}")
        self.times.append(float(t))
        self.positions.append(float(x_half))
        self.levels.append(float(k_local))

    def __len__(self) -> int:
        return len(self.times)


InitialProfile = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]


def _time_grid(t_end: float, dx_fine: float, dt: Optional[float]):
    if t_end < 0:
        raise ParameterError(f"t_end must be >= 0, got {t_end}")
    if dt is None:
        dt_max = DEFAULT_K * 2.0 * dx_fine**2
        nsteps = int(np.ceil(t_end / dt_max - 1e-12))
        dt = t_end / nsteps if nsteps else 0.0
    else:
        k_fine = dt / (2.0 * dx_fine**2)
        if not (dt > 0 and k_fine < EXPLICIT_K_LIMIT):
            raise ParameterError(
                f"refined CFL number {k_fine:.4g} violates the explicit bound k < {EXPLICIT_K_LIMIT}"
            )
        nsteps = int(round(t_end / dt))
        if abs(nsteps * dt - t_end) > 1e-9 * max(1.0, t_end):
            raise ParameterError(f"t_end={t_end} is not a multiple of dt={dt}")
    return nsteps, dt


def _check_refine(refine: int) -> int:
    if int(refine) != refine or refine < MIN_REFINE:
        raise ParameterError(f"refine must be an integer >= {MIN_REFINE}, got {refine}")
    return int(refine)


def _fine_initial(u0: InitialProfile, x_fine: np.ndarray, x_coarse: np.ndarray) -> np.ndarray:
    if callable(u0):
        return np.asarray(u0(x_fine), dtype=np.float64)
    return np.interp(x_fine, x_coarse, np.asarray(u0, dtype=np.float64))


@njit(cache=True)
def _euler_1d(u, nsteps, dt, d, growth):
    m = u.size
    lap = np.empty(m)
    for _ in range(nsteps):
        for i in range(m):
            left = u[i - 1] if i > 0 else 0.0
            right = u[i + 1] if i < m - 1 else 0.0
            lap[i] = left - 2.0 * u[i] + right
        for i in range(m):
            du = d * lap[i]
            if growth:
                du += (1.0 - u[i]) * u[i]
            u[i] += dt * du
    return u


@njit(cache=True)
def _euler_radial(u, nsteps, dt, d, growth):
    # lap(u) ~ (1 - 1/(2i)) u[i-1] - 2 u[i] + (1 + 1/(2i)) u[i+1]; 4 (u1 - u0) at r = 0
    m = u.size
    lap = np.empty(m)
    for _ in range(nsteps):
        lap[0] = 4.0 * (u[1] - u[0])
        for i in range(1, m):
            right = u[i + 1] if i < m - 1 else 0.0
            lap[i] = (1.0 - 0.5 / i) * u[i - 1] - 2.0 * u[i] + (1.0 + 0.5 / i) * right
        for i in range(m):
            du = d * lap[i]
            if growth:
                du += (1.0 - u[i]) * u[i]
            u[i] += dt * du
    return u


def reference_1d(u0: InitialProfile, params, t_end: float, refine: int = MIN_REFINE, *,
                 n: Optional[int] = None, dt: Optional[float] = None,
                 diffusion: bool = True, growth: bool = True) -> np.ndarray:
    """Explicit fine-grid solution on nodes ``x_j = j * dx``, ``j = 0..n-1``.

    Only ``params.dx`` is used; the fine time step follows from the
    refined spacing unless ``dt`` is given. ``u = 0`` holds at ``x = -dx`` and ``x = n * dx``, matching the ghost
    cells of the split solver. ``u0`` is either the coarse node values
    (linearly interpolated onto the fine grid) or a callable of x.
    Returns the coarse-node samples at ``t_end``.
    """
    refine = _check_refine(refine)
    dx = params.dx
    if n is None:
        if callable(u0):
            raise ValueError("n is required when u0 is a callable")
        n = len(u0)
    dxf = dx / refine
    nsteps, dtf = _time_grid(t_end, dxf, dt)
    m = (n + 1) * refine - 1
    xf = -dx + dxf * np.arange(1, m + 1)
    u = np.array(_fine_initial(u0, xf, dx * np.arange(n)), dtype=np.float64)
    d = 0.5 / dxf**2 if diffusion else 0.0
    u = _euler_1d(u, nsteps, dtf, d, growth)
    return u[refine - 1 :: refine][:n].copy()


def reference_radial(u0: Union[RadialField, Callable[[np.ndarray], np.ndarray]], params,
                     t_end: float, refine: int = MIN_REFINE, *, nr: Optional[int] = None,
                     dt: Optional[float] = None, diffusion: bool = True,
                     growth: bool = True) -> RadialField:
    """Explicit fine-grid solution of the radially symmetric 2-D problem.

    The origin uses the symmetric limit ``lap(u) = 2 u_rr``; ``u = 0`` is
    imposed at the outer radius. A callable ``u0`` is sampled on ``nr``
    nodes spaced ``params.dx``.
    """
    refine = _check_refine(refine)
    if isinstance(u0, RadialField):
        nr, dr = u0.nr, u0.dr
        coarse_r = u0.r
        init: InitialProfile = u0.values
    else:
        if nr is None:
            raise ValueError("nr is required when u0 is a callable")
        dr = params.dx
        coarse_r = dr * np.arange(nr)
        init = u0
    drf = dr / refine
    nsteps, dtf = _time_grid(t_end, drf, dt)
    mf = nr * refine
    rf = drf * np.arange(mf)
    u = np.array(_fine_initial(init, rf, coarse_r), dtype=np.float64)
    d = 0.5 / drf**2 if diffusion else 0.0
    u = _euler_radial(u, nsteps, dtf, d, growth)
    return RadialField(nr, dr, u[::refine].copy())


def front_position(u, K_level=1.0, dx: float = 1.0, x0: float = 0.0) -> Optional[float]:
    """Leading-edge position where ``u`` falls through ``K_level / 2``.

    Scans from the largest index for the first node at or above the
    level and interpolates linearly to the next node. ``K_level`` may be
    a scalar or a per-node array. Returns None if no node reaches it.
    """
    u = np.asarray(u, dtype=np.float64)
    d = u - 0.5 * np.broadcast_to(np.asarray(K_level, dtype=np.float64), u.shape)
    above = np.flatnonzero(d >= 0.0)
    if above.size == 0:
        return None
    i = int(above[-1])
    if i == u.size - 1:
        return x0 + i * dx
    frac = d[i] / (d[i] - d[i + 1])
    return x0 + (i + frac) * dx


def front_velocity(trace: FrontTrace, window=None):
    """Centered-difference front velocities ``(t, v)`` at interior samples.

    Only samples with ``window[0] <= t <= window[1]`` are returned.
    """
    t = np.asarray(trace.times, dtype=np.float64)
    x = np.asarray(trace.positions, dtype=np.float64)
    if t.size < 3:
        return np.empty(0), np.empty(0)
    tc = t[1:-1]
    v = (x[2:] - x[:-2]) / (t[2:] - t[:-2])
    if window is not None:
        keep = (tc >= window[0]) & (tc <= window[1])
        tc, v = tc[keep], v[keep]
    return tc, v


def error_metrics(u2d: Field2D, u_radial: RadialField, center, *, margin: int = 2,
                  floor: float = 1e-12):
    """RMS and max of ``|u(x, y) - u_ref(r)|`` over the grid.

    ``center`` is ``(x, y)`` in the grid's length units with cell (0, 0)
    at the origin. The outermost ``margin`` cells are excluded, as are
    cells where both values are below ``floor``.
    """
    g = u2d.grid
    x = g.dx * np.arange(g.nx) - center[0]
    y = g.dx * np.arange(g.ny) - center[1]
    r = np.hypot(x[None, :], y[:, None])
    ref = u_radial.at(r)
    diff = np.abs(u2d.values - ref)
    keep = (np.abs(u2d.values) > floor) | (np.abs(ref) > floor)
    if margin:
        inner = np.zeros_like(keep)
        inner[margin:-margin, margin:-margin] = True
        keep &= inner
    if not keep.any():
        return 0.0, 0.0
    sel = diff[keep]
    return float(np.sqrt(np.mean(sel**2))), float(sel.max())


def error_field(u2d: Field2D, u_radial: RadialField, center) -> np.ndarray:
    """Signed error ``u(x, y) - u_ref(r)`` on every cell."""
    g = u2d.grid
    x = g.dx * np.arange(g.nx) - center[0]
    y = g.dx * np.arange(g.ny) - center[1]
    return u2d.values - u_radial.at(np.hypot(x[None, :], y[:, None]))


def asymmetry(e: np.ndarray) -> float:
    """``||e - rot90(e)|| / ||e||`` for a square error field."""
    norm = np.linalg.norm(e)
    if norm == 0.0:
        return 0.0
    return float(np.linalg.norm(e - np.rot90(e)) / norm)
