"""Semi-implicit time steppers for the scaled Fisher/KPP equation.

One 2-D step is three directional sweeps over the segments of a
:class:`~kppmap.domain.Segmentation`: a half diffusion step along ``x``,
a full step along ``y`` that carries the logistic term, and another half
diffusion step along ``x``. With ``alternate_directions`` the two
directions swap on odd steps.

Each segment is updated in place with a single scratch vector: the
right-hand side, the forward elimination and the back substitution are
fused so that only the modified super-diagonal needs storage.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Optional

import numba
import numpy as np
from numba import njit, prange

from .domain import CapacityFrame, Field2D, Segmentation, X_AXIS, Y_AXIS
from .linalg import PIVOT_RTOL, apply_second_difference

THREADS_ENV = "KPP_THREADS"

# prefer OpenMP; an old TBB runtime otherwise triggers a version warning
if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ and "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]

OK = 0
SINGULAR = 1
NOT_DOMINANT = 2
NOT_FINITE = 3
BAD_CAPACITY = 4

_STATUS_TEXT = {
    SINGULAR: "near-zero pivot",
    NOT_DOMINANT: "tridiagonal system not diagonally dominant",
    NOT_FINITE: "non-finite value",
    BAD_CAPACITY: "non-positive capacity on a habitable cell",
}


class DivergenceError(FloatingPointError):
    """The simulation produced non-finite values or a singular system."""

    def __init__(self, step_index: int, message: str):
        super().__init__(f"step {step_index}: {message}")
        self.step_index = step_index


@dataclass(frozen=True)
class SolverParams:
    """Step size ``h``, spacing ``dx`` and scheme switches.

    The CFL number ``k = h / (2 dx^2)`` is derived, never stored.
    """

    h: float
    dx: float
    beta: float = 4.0
    alternate_directions: bool = True
    regularize: bool = True

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"time step must be positive, got {self.h}")
        if not self.dx > 0:
            raise ValueError(f"grid spacing must be positive, got {self.dx}")
        if not self.beta >= 1:
            raise ValueError(f"regularizer exponent must be >= 1, got {self.beta}")

    @property
    def k(self) -> float:
        return self.h / (2.0 * self.dx * self.dx)


# ---------------------------------------------------------------------------
# scalar and line kernels


@njit(cache=True)
def _ratio(u, cap, h, beta, regularize):
    r = u / cap
    if not regularize:
        return r
    x = h * r
    ax = abs(x)
    y = ax**beta
    if y == 0.0:
        g = ax
    elif y > 40.0:
        g = 1.0
    else:
        # x * (tanh(y)/y)^(1/beta) == tanh(x^beta)^(1/beta), exact for tiny x
        g = ax * (math.tanh(y) / y) ** (1.0 / beta)
    return math.copysign(g, x) / h


@njit(cache=True)
def _diffusion_line(line, s, e, c, w, debug):
    """Solve (1 - c A) v_new = (1 + c A) v on line[s:e+1] in place."""
    n = e - s + 1
    d = 1.0 + 2.0 * c
    off = -c
    vprev = 0.0
    fprev = 0.0
    wprev = 0.0
    minpiv = math.inf
    for i in range(n):
        v = line[s + i]
        vnext = line[s + i + 1] if i < n - 1 else 0.0
        rhs = v + c * (vprev - 2.0 * v + vnext)
        piv = d - off * wprev
        if abs(piv) < minpiv:
            minpiv = abs(piv)
        wprev = off / piv
        w[i] = wprev
        fprev = (rhs - off * fprev) / piv
        line[s + i] = fprev
        vprev = v
    if minpiv <= PIVOT_RTOL * d:
        return SINGULAR
    for i in range(n - 2, -1, -1):
        line[s + i] -= w[i] * line[s + i + 1]
    if debug:
        for i in range(n):
            if not math.isfinite(line[s + i]):
                return NOT_FINITE
    return OK


@njit(cache=True)
def _logistic_line(line, cap0, cap1, s, e, c, h, beta, regularize, w, debug):
    """Full semi-implicit step with the logistic term on line[s:e+1].

    ``cap0`` is the capacity at t (explicit terms and the Euler
    estimate), ``cap1`` at t + h (implicit coefficient). ``c`` is k/2.
    """
    n = e - s + 1
    off = -c
    vprev = 0.0
    fprev = 0.0
    wprev = 0.0
    minpiv = math.inf
    maxdiag = 0.0
    status = OK
    for i in range(n):
        v = line[s + i]
        vnext = line[s + i + 1] if i < n - 1 else 0.0
        k0 = cap0[s + i]
        k1 = cap1[s + i]
        if debug and (not k0 > 0.0 or not k1 > 0.0):
            return BAD_CAPACITY
        av = vprev - 2.0 * v + vnext
        grow = 1.0 - _ratio(v, k0, h, beta, regularize)
        u_euler = v + 2.0 * c * av + h * grow * v
        rhs = v + c * av + 0.5 * h * grow * v
        diag = 1.0 + 2.0 * c - 0.5 * h * (1.0 - _ratio(u_euler, k1, h, beta, regularize))
        if debug and not abs(diag) > 2.0 * c:
            status = NOT_DOMINANT
        if abs(diag) > maxdiag:
            maxdiag = abs(diag)
        piv = diag - off * wprev
        if abs(piv) < minpiv:
            minpiv = abs(piv)
        wprev = off / piv
        w[i] = wprev
        fprev = (rhs - off * fprev) / piv
        line[s + i] = fprev
        vprev = v
    if minpiv <= PIVOT_RTOL * maxdiag or not minpiv > 0.0:
        return SINGULAR
    for i in range(n - 2, -1, -1):
        line[s + i] -= w[i] * line[s + i + 1]
    if status != OK:
        return status
    if debug:
        for i in range(n):
            if not math.isfinite(line[s + i]):
                return NOT_FINITE
    return OK


@njit(parallel=True, cache=True)
def _sweep(u2, cap0, cap1, offsets, starts, ends, c, h, beta, regularize, logistic,
           work, debug, status):
    """Apply one directional sweep to every segment; lines are axis 0 of u2.

    Lines are split into ``work.shape[0]`` contiguous chunks, one scratch
    row each. The result does not depend on the chunking.
    """
    nlines = offsets.shape[0] - 1
    nchunks = work.shape[0]
    for t in prange(nchunks):
        lo = t * nlines // nchunks
        hi = (t + 1) * nlines // nchunks
        w = work[t]
        for j in range(lo, hi):
            line = u2[j]
            for q in range(offsets[j], offsets[j + 1]):
                if logistic:
                    st = _logistic_line(line, cap0[j], cap1[j], starts[q], ends[q],
                                        c, h, beta, regularize, w, debug)
                else:
                    st = _diffusion_line(line, starts[q], ends[q], c, w, debug)
                if st != OK and status[t, 0] == OK:
                    status[t, 0] = st
                    status[t, 1] = j


@njit(cache=True)
def _all_finite(a):
    for v in a.flat:
        if not math.isfinite(v):
            return False
    return True


# ---------------------------------------------------------------------------
# threads and workspace


def thread_count() -> int:
    """Chunk/thread count from ``KPP_THREADS`` (0 or unset means automatic)."""
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0, got {n}")
    if n == 0:
        return numba.config.NUMBA_NUM_THREADS
    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    return n


class StepWorkspace:
    """Scratch storage for the sweeps: one vector per concurrently active line.

    Each vector holds ``max(nx, ny) + 2`` cells; nothing proportional to
    the grid area is allocated while stepping.
    """

    def __init__(self, nx: int, ny: int, threads: Optional[int] = None):
        self.threads = thread_count() if threads is None else int(threads)
        if self.threads < 1:
            raise ValueError("workspace needs at least one thread")
        self.cells_per_line = max(nx, ny) + 2
        self.buffer = np.zeros((self.threads, self.cells_per_line))
        self.status = np.zeros((self.threads, 2), dtype=np.int64)

    @property
    def allocated_cells(self) -> int:
        return int(self.buffer.size)

    def fits(self, nx: int, ny: int) -> bool:
        return self.cells_per_line >= max(nx, ny) + 2


# ---------------------------------------------------------------------------
# public operations


def regularized_ratio(u: float, K: float, h: float, beta: float = 4.0) -> float:
    """Bounded stand-in for ``u / K``: ``g(h u / K) / h`` with
    ``g(x) = tanh(x**beta) ** (1 / beta)``.

    Close to ``u / K`` while ``h u / K`` is small and saturating at
    ``1 / h``. Negative arguments are mapped by odd extension.
    """
    if not K > 0:
        raise ValueError(f"capacity must be positive, got {K}")
    if not h > 0:
        raise ValueError(f"step size must be positive, got {h}")
    return float(_ratio(float(u), float(K), float(h), float(beta), True))


def _ratios(u, cap, params: SolverParams) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    cap = np.broadcast_to(np.asarray(cap, dtype=np.float64), u.shape)
    return np.array([_ratio(a, b, params.h, params.beta, params.regularize)
                     for a, b in zip(u, cap)])


def euler_estimate_1d(u, params: SolverParams, capacity=1.0) -> np.ndarray:
    """Explicit Euler estimate ``u + k A u + h (1 - u/K) u`` of a padded line.

    ``u`` carries one zero ghost cell at each end; ``capacity`` is either
    a scalar or a padded vector with ghost value 1. Ghosts stay zero.
    """
    u = np.asarray(u, dtype=np.float64)
    inner = u[1:-1]
    cap = capacity if np.ndim(capacity) == 0 else np.asarray(capacity)[1:-1]
    out = np.zeros_like(u)
    out[1:-1] = (inner + params.k * apply_second_difference(inner)
                 + params.h * (1.0 - _ratios(inner, cap, params)) * inner)
    return out


def step_1d(u, params: SolverParams, capacity=None) -> np.ndarray:
    """One semi-implicit step of the 1-D scheme on a padded line.

    Solves ``(1 - k/2 A - h/2 (1 - u_E/K)) u_new = u + k/2 A u + h/2 (1 - u/K) u``
    on the interior, with zero ghost cells kept at both ends.
    """
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 1 or u.size < 3:
        raise ValueError("expected a padded vector of length >= 3")
    line = u.copy()
    line[0] = line[-1] = 0.0
    if capacity is None:
        cap = np.ones_like(line)
    else:
        cap = np.broadcast_to(np.asarray(capacity, dtype=np.float64), line.shape).copy()
    w = np.empty(line.size)
    st = _logistic_line(line, cap, cap, 1, line.size - 2, 0.5 * params.k, params.h,
                        params.beta, params.regularize, w, False)
    if st != OK:
        raise DivergenceError(0, _STATUS_TEXT[st])
    return line


def integrate_1d(u0, params: SolverParams, t_end: float, t_start: float = 0.0,
                 on_step: Optional[Callable[[float, np.ndarray], None]] = None) -> np.ndarray:
    """Repeat :func:`step_1d` from ``t_start`` to ``t_end``.

    ``u0`` is the unpadded initial line; returns the unpadded final line.
    """
    nsteps = steps_between(t_start, t_end, params.h)
    line = np.zeros(len(u0) + 2)
    line[1:-1] = u0
    cap = np.ones_like(line)
    w = np.empty(line.size)
    c = 0.5 * params.k
    for n in range(nsteps):
        st = _logistic_line(line, cap, cap, 1, line.size - 2, c, params.h,
                            params.beta, params.regularize, w, False)
        if st != OK or not np.all(np.isfinite(line)):
            raise DivergenceError(n, _STATUS_TEXT.get(st, "non-finite value"))
        if on_step is not None:
            on_step(t_start + (n + 1) * params.h, line[1:-1])
    return line[1:-1].copy()


def steps_between(t_start: float, t_end: float, h: float) -> int:
    """Number of steps of size ``h`` spanning ``[t_start, t_end]``."""
    span = (t_end - t_start) / h
    n = int(round(span))
    if n < 0 or abs(span - n) > 1e-9 * max(1.0, abs(span)):
        raise ValueError(f"interval [{t_start}, {t_end}] is not a whole number of steps of {h}")
    return n


class GodunovStepper:
    """In-place 2-D stepping on a fixed segmentation.

    Holds the workspace so that repeated steps allocate nothing
    proportional to the grid.
    """

    def __init__(self, seg: Segmentation, params: SolverParams,
                 workspace: Optional[StepWorkspace] = None, debug: bool = False):
        g = seg.grid
        if abs(params.dx - g.dx) > 1e-12 * g.dx:
            raise ValueError(f"solver spacing {params.dx} differs from grid spacing {g.dx}")
        self.seg = seg
        self.params = params
        self.workspace = workspace or StepWorkspace(g.nx, g.ny)
        if not self.workspace.fits(g.nx, g.ny):
            raise ValueError("workspace too small for grid")
        self.debug = debug
        # K = 1 as a zero-stride view: no storage proportional to the grid
        self._ones = np.broadcast_to(np.ones(1), g.shape)

    def _run_sweep(self, values, axis, cap0, cap1, c, logistic, step_index):
        p = self.params
        offsets, starts, ends = self.seg.line_arrays(axis)
        if axis == Y_AXIS:
            values, cap0, cap1 = values.T, cap0.T, cap1.T
        ws = self.workspace
        ws.status[:] = 0
        _sweep(values, cap0, cap1, offsets, starts, ends, c, p.h, p.beta, p.regularize,
               logistic, ws.buffer, self.debug, ws.status)
        bad = np.flatnonzero(ws.status[:, 0])
        if bad.size:
            code, line = ws.status[bad[0]]
            raise DivergenceError(step_index, f"{_STATUS_TEXT[int(code)]} on {axis}-line {int(line)}")

    def step(self, values: np.ndarray, cap_t=None, cap_next=None, step_index: int = 0) -> None:
        """Advance ``values`` (shape ``(ny, nx)``) by one step in place.

        ``cap_t`` and ``cap_next`` are capacity arrays at t and t + h;
        ``None`` means K = 1 everywhere.
        """
        if values.shape != self.seg.grid.shape:
            raise ValueError(f"field shape {values.shape} differs from grid {self.seg.grid.shape}")
        cap0 = self._ones if cap_t is None else np.asarray(cap_t, dtype=np.float64)
        cap1 = cap0 if cap_next is None else np.asarray(cap_next, dtype=np.float64)
        half, full = X_AXIS, Y_AXIS
        if self.params.alternate_directions and step_index % 2 == 1:
            half, full = Y_AXIS, X_AXIS
        k = self.params.k
        self._run_sweep(values, half, cap0, cap1, 0.25 * k, False, step_index)
        self._run_sweep(values, full, cap0, cap1, 0.5 * k, True, step_index)
        self._run_sweep(values, half, cap0, cap1, 0.25 * k, False, step_index)
        if not _all_finite(values):
            raise DivergenceError(step_index, "non-finite value in field")

    def integrate(self, values: np.ndarray, t_start: float, t_end: float,
                  capacity: Optional[Callable[[float], Optional[np.ndarray]]] = None,
                  on_step: Optional[Callable[[int, float, np.ndarray], None]] = None,
                  first_step: int = 0) -> int:
        """Step ``values`` in place from ``t_start`` to ``t_end``.

        ``capacity(t)`` returns the capacity array at time t (or None for
        K = 1). ``on_step(n, t, values)`` runs after each step. Returns
        the number of steps taken.
        """
        h = self.params.h
        nsteps = steps_between(t_start, t_end, h)
        cap_next = capacity(t_start) if capacity is not None else None
        for n in range(nsteps):
            t = t_start + n * h
            cap_t = cap_next
            if capacity is not None:
                cap_next = capacity(t_start + (n + 1) * h)
            self.step(values, cap_t, cap_next, first_step + n)
            if on_step is not None:
                on_step(first_step + n + 1, t + h, values)
        return nsteps


def godunov_step_2d(u: Field2D, seg: Segmentation, K_t: Optional[CapacityFrame],
                    K_t_plus_h: Optional[CapacityFrame], params: SolverParams,
                    step_index: int = 0, workspace: Optional[StepWorkspace] = None,
                    debug: bool = False) -> Field2D:
    """One split step of the 2-D scheme, returning a new field.

    Pass ``K_t is K_t_plus_h`` for static capacity, or ``None`` for
    both to get the constant K = 1 scheme.
    """
    for frame in (K_t, K_t_plus_h):
        if frame is not None and frame.grid != u.grid:
            raise ValueError("capacity frame grid differs from field grid")
    if seg.grid != u.grid:
        raise ValueError("segmentation grid differs from field grid")
    out = u.values.copy()
    stepper = GodunovStepper(seg, params, workspace, debug)
    cap_t = None if K_t is None else K_t.values
    cap_next = cap_t if K_t_plus_h is None else K_t_plus_h.values
    stepper.step(out, cap_t, cap_next, step_index)
    return Field2D(u.grid, out)
