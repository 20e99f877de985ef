"""Independent dense implementations used as test oracles.

These build whole-grid matrices over the habitable cells and solve
with ``numpy.linalg.solve``; they share no code with the package.
"""

import numpy as np

from kppmap.domain import X_AXIS, Y_AXIS


def g_reg(x, beta):
    """Odd extension of tanh(|x|**beta) ** (1/beta)."""
    return np.sign(x) * np.tanh(np.abs(x) ** beta) ** (1.0 / beta)


def ratio(u, K, h, beta, regularize):
    r = u / K
    return g_reg(h * r, beta) / h if regularize else r


def directional_laplacian(hab, axis):
    """Dense second difference along one axis over habitable cells.

    Water neighbours and the grid edge act as zero (Dirichlet) values.
    ``axis='x'`` couples horizontal neighbours, ``'y'`` vertical ones.
    """
    ny, nx = hab.shape
    idx = -np.ones((ny, nx), dtype=int)
    cells = np.argwhere(hab)
    idx[hab] = np.arange(len(cells))
    A = -2.0 * np.eye(len(cells))
    dj, di = (0, 1) if axis == "x" else (1, 0)
    for p, (j, i) in enumerate(cells):
        for s in (-1, 1):
            jj, ii = j + s * dj, i + s * di
            if 0 <= jj < ny and 0 <= ii < nx and hab[jj, ii]:
                A[p, idx[jj, ii]] = 1.0
    return A


def dense_step(u, hab, K0, K1, h, dx, beta=4.0, regularize=True, alternate=True, step_index=0):
    """One split step: half diffusion, full logistic step, half diffusion."""
    k = h / (2.0 * dx * dx)
    half, full = "x", "y"
    if alternate and step_index % 2 == 1:
        half, full = "y", "x"
    v = u[hab].astype(float)
    k0, k1 = K0[hab], K1[hab]
    Ah = directional_laplacian(hab, half)
    Af = directional_laplacian(hab, full)
    eye = np.eye(len(v))
    v = np.linalg.solve(eye - 0.25 * k * Ah, (eye + 0.25 * k * Ah) @ v)
    grow = 1.0 - ratio(v, k0, h, beta, regularize)
    ue = v + k * (Af @ v) + h * grow * v
    rhs = v + 0.5 * k * (Af @ v) + 0.5 * h * grow * v
    lhs = eye - 0.5 * k * Af - np.diag(0.5 * h * (1.0 - ratio(ue, k1, h, beta, regularize)))
    v = np.linalg.solve(lhs, rhs)
    v = np.linalg.solve(eye - 0.25 * k * Ah, (eye + 0.25 * k * Ah) @ v)
    out = np.zeros_like(u, dtype=float)
    out[hab] = v
    return out


def dense_step_1d(u, h, dx, K=1.0, beta=4.0, regularize=True):
    """One semi-implicit 1-D step on an unpadded line with zero ends."""
    n = len(u)
    k = h / (2.0 * dx * dx)
    A = -2.0 * np.eye(n) + np.eye(n, k=1) + np.eye(n, k=-1)
    K = np.broadcast_to(K, u.shape)
    grow = 1.0 - ratio(u, K, h, beta, regularize)
    ue = u + k * (A @ u) + h * grow * u
    rhs = u + 0.5 * k * (A @ u) + 0.5 * h * grow * u
    lhs = np.eye(n) - 0.5 * k * A - np.diag(0.5 * h * (1.0 - ratio(ue, K, h, beta, regularize)))
    return np.linalg.solve(lhs, rhs)


def random_step_case(rng, variant):
    """Random masked grid of at most 6x6 with field, capacities and parameters."""
    ny, nx = rng.integers(1, 7, size=2)
    hab = rng.random((ny, nx)) < 0.7
    if not hab.any():
        hab[rng.integers(ny), rng.integers(nx)] = True
    u = np.where(hab, rng.random((ny, nx)), 0.0)
    if variant == "constant":
        K0 = K1 = np.where(hab, 1.0, 0.0)
    else:
        K0 = np.where(hab, rng.uniform(0.05, 1.0, (ny, nx)), 0.0)
        K1 = K0 if variant == "static" else np.where(hab, rng.uniform(0.05, 1.0, (ny, nx)), 0.0)
        u = np.minimum(u, K0)
    h = float(rng.uniform(0.02, 0.5))
    dx = float(rng.uniform(0.3, 1.0))
    return hab, u, K0, K1, h, dx


def dense_gauss(m, b):
    """Naive Gaussian elimination with partial pivoting."""
    a = np.hstack([np.array(m, dtype=float), np.array(b, dtype=float)[:, None]])
    n = len(b)
    for c in range(n):
        p = c + int(np.argmax(np.abs(a[c:, c])))
        a[[c, p]] = a[[p, c]]
        for r in range(c + 1, n):
            a[r] -= a[r, c] / a[c, c] * a[c]
    x = np.zeros(n)
    for r in range(n - 1, -1, -1):
        x[r] = (a[r, -1] - a[r, r + 1 : n] @ x[r + 1 :]) / a[r, r]
    return x


def brute_runs(line):
    runs, start = [], None
    for i, v in enumerate(line):
        if v and start is None:
            start = i
        if not v and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(line) - 1))
    return runs


def brute_segments(hab):
    rows = [brute_runs(r) for r in hab]
    cols = [brute_runs(c) for c in hab.T]
    return rows, cols


def as_lists(seg):
    """Segmentation read back through the package accessors, for comparison."""
    rows = [seg.segments(X_AXIS, j) for j in range(seg.grid.ny)]
    cols = [seg.segments(Y_AXIS, i) for i in range(seg.grid.nx)]
    return rows, cols
