"""Tridiagonal solves and the 1-D second-difference operator.

Every sweep of the splitting scheme reduces to many small tridiagonal
systems whose off-diagonals are constants, so the solver takes the
off-diagonals as two scalars and the diagonal as a vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

PIVOT_RTOL = 1e-14


class SingularSystemError(ArithmeticError):
    """Raised when a tridiagonal elimination meets a (near-)zero pivot."""


@dataclass
class TridiagSystem:
    """Tridiagonal system with constant sub- and super-diagonals.

    Row ``i`` reads ``sub * x[i-1] + diag[i] * x[i] + sup * x[i+1] = rhs[i]``.
    """

    n: int
    sub: float
    sup: float
    diag: np.ndarray
    rhs: np.ndarray
    check_dominance: bool = False

    def __post_init__(self):
        self.diag = np.asarray(self.diag, dtype=np.float64)
        self.rhs = np.asarray(self.rhs, dtype=np.float64)
        if self.n < 1:
            raise ValueError(f"system size must be >= 1, got {self.n}")
        if self.diag.shape != (self.n,) or self.rhs.shape != (self.n,):
            raise ValueError(
                f"diag and rhs must have length {self.n}, "
                f"got {self.diag.shape} and {self.rhs.shape}"
            )
        if self.check_dominance:
            bound = abs(self.sub) + abs(self.sup)
            if not np.all(np.abs(self.diag) > bound):
                i = int(np.argmin(np.abs(self.diag) - bound))
                raise ValueError(
                    f"row {i} not strictly diagonally dominant: "
                    f"|{self.diag[i]}| <= {bound}"
                )

    def to_dense(self) -> np.ndarray:
        m = np.diag(self.diag)
        if self.n > 1:
            m += np.diag(np.full(self.n - 1, self.sub), -1)
            m += np.diag(np.full(self.n - 1, self.sup), 1)
        return m


@njit(cache=True)
def thomas_solve(sub, sup, diag, rhs, n, cp, out):
    """Thomas elimination on the first ``n`` entries of the buffers.

    ``cp`` is scratch of length >= n; ``out`` receives the solution and
    may alias ``rhs``. Returns 0 on success, ``i + 1`` when the pivot of
    row ``i`` is below ``PIVOT_RTOL * max|diag|``.
    """
    scale = 0.0
    for i in range(n):
        a = abs(diag[i])
        if a > scale:
            scale = a
    tol = PIVOT_RTOL * scale
    piv = diag[0]
    if abs(piv) <= tol:
        return 1
    cp[0] = sup / piv
    out[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - sub * cp[i - 1]
        if abs(piv) <= tol:
            return i + 1
        cp[i] = sup / piv
        out[i] = (rhs[i] - sub * out[i - 1]) / piv
    for i in range(n - 2, -1, -1):
        out[i] -= cp[i] * out[i + 1]
    return 0


def solve_tridiagonal(sys: TridiagSystem) -> np.ndarray:
    """Solve ``sys`` without pivoting.

    Relies on diagonal dominance, which every system built by the
    steppers has. Single-row systems are a plain division.
    """
    n = sys.n
    if n == 1:
        if abs(sys.diag[0]) == 0.0:
            raise SingularSystemError("zero pivot in 1x1 system")
        return sys.rhs / sys.diag
    out = np.empty(n)
    cp = np.empty(n)
    status = thomas_solve(float(sys.sub), float(sys.sup), sys.diag, sys.rhs, n, cp, out)
    if status:
        raise SingularSystemError(f"near-zero pivot at row {status - 1}")
    return out


def apply_second_difference(u) -> np.ndarray:
    """``out[i] = u[i-1] - 2 u[i] + u[i+1]`` with zero values outside."""
    u = np.asarray(u, dtype=np.float64)
    # neighbour sum first, so mirrored inputs give exactly mirrored outputs
    nb = np.zeros_like(u)
    nb[1:] += u[:-1]
    nb[:-1] += u[1:]
    return nb - 2.0 * u


def second_difference_matrix(n: int) -> np.ndarray:
    """Dense ``n x n`` Dirichlet second-difference matrix."""
    return -2.0 * np.eye(n) + np.eye(n, k=1) + np.eye(n, k=-1)
