"""Hot inner loops.

Every kernel exists twice: a plain-loop version that numba compiles with
``@njit`` and a vectorized pure-numpy version. ``USING_NUMBA`` tells which
one the public names are bound to; set ``DRSUBMAX_DISABLE_NUMBA=1`` before
import to force the numpy path. Both versions are importable directly
(``*_loops`` / ``*_numpy``) so tests and the benchmark can compare them.
"""

import numpy as np

from ._config import DISABLE_NUMBA, NUMBA_CACHE

try:  # pragma: no cover - exercised implicitly
    if DISABLE_NUMBA:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

# status codes returned by the simplex kernels
OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2


# ---------------------------------------------------------------------------
# Bland's-rule simplex on a dense tableau
#
# Tableau layout: rows 0..m-1 are constraints, row m is the reduced-profit
# row; the last column is the right-hand side. A column enters while its
# reduced profit is > tol (lowest index first); the leaving row is the
# minimum ratio, ties to the lowest basic-variable index.
# ---------------------------------------------------------------------------


def bland_simplex_loops(T, basis, tol, max_iter):
    m = T.shape[0] - 1
    ncol = T.shape[1] - 1
    it = 0
    while it < max_iter:
        enter = -1
        for j in range(ncol):
            if T[m, j] > tol:
                enter = j
                break
        if enter < 0:
            return OPTIMAL, it

        best = np.inf
        for i in range(m):
            a = T[i, enter]
            if a > tol:
                r = T[i, ncol] / a
                if r < best:
                    best = r
        if best == np.inf:
            return UNBOUNDED, it
        cutoff = best + 1e-12 * (1.0 + abs(best))
        leave = -1
        for i in range(m):
            a = T[i, enter]
            if a > tol and T[i, ncol] / a <= cutoff:
                if leave < 0 or basis[i] < basis[leave]:
                    leave = i

        piv = T[leave, enter]
        for k in range(ncol + 1):
            T[leave, k] /= piv
        T[leave, enter] = 1.0
        for i in range(m + 1):
            if i != leave:
                f = T[i, enter]
                if f != 0.0:
                    for k in range(ncol + 1):
                        T[i, k] -= f * T[leave, k]
                    T[i, enter] = 0.0
        basis[leave] = enter
        it += 1
    return ITERATION_LIMIT, it


def bland_simplex_numpy(T, basis, tol, max_iter):
    m = T.shape[0] - 1
    ncol = T.shape[1] - 1
    it = 0
    while it < max_iter:
        positive = np.flatnonzero(T[m, :ncol] > tol)
        if positive.size == 0:
            return OPTIMAL, it
        enter = positive[0]

        col = T[:m, enter]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            return UNBOUNDED, it
        ratios = T[rows, ncol] / col[rows]
        best = ratios.min()
        tied = rows[ratios <= best + 1e-12 * (1.0 + abs(best))]
        leave = tied[np.argmin(basis[tied])]

        T[leave] /= T[leave, enter]
        T[leave, enter] = 1.0
        f = T[:, enter].copy()
        f[leave] = 0.0
        nz = np.flatnonzero(f)
        T[nz] -= np.outer(f[nz], T[leave])
        T[nz, enter] = 0.0
        basis[leave] = enter
        it += 1
    return ITERATION_LIMIT, it


# ---------------------------------------------------------------------------
# Dykstra's alternating projections onto {x : A x <= b} ∩ [0, ubar]
# ---------------------------------------------------------------------------


def dykstra_loops(y, A, b, ubar, tol, max_sweeps):
    m, n = A.shape
    x = y.copy()
    incr = np.zeros((m + 1, n))
    norms = np.zeros(m)
    for i in range(m):
        s = 0.0
        for j in range(n):
            s += A[i, j] * A[i, j]
        norms[i] = s
    z = np.empty(n)
    prev = np.empty(n)
    residual = np.inf
    for sweep in range(1, max_sweeps + 1):
        for j in range(n):
            prev[j] = x[j]
        for i in range(m):
            viol = -b[i]
            for j in range(n):
                z[j] = x[j] + incr[i, j]
                viol += A[i, j] * z[j]
            if viol > 0.0 and norms[i] > 0.0:
                step = viol / norms[i]
                for j in range(n):
                    x[j] = z[j] - step * A[i, j]
                    incr[i, j] = step * A[i, j]
            else:
                for j in range(n):
                    x[j] = z[j]
                    incr[i, j] = 0.0
        for j in range(n):
            zj = x[j] + incr[m, j]
            xj = min(max(zj, 0.0), ubar[j])
            incr[m, j] = zj - xj
            x[j] = xj

        change = 0.0
        for j in range(n):
            change = max(change, abs(x[j] - prev[j]))
        residual = 0.0
        for i in range(m):
            s = -b[i]
            for j in range(n):
                s += A[i, j] * x[j]
            residual = max(residual, s)
        if change <= tol and residual <= tol:
            return x, sweep, residual, True
    return x, max_sweeps, residual, False


def dykstra_numpy(y, A, b, ubar, tol, max_sweeps):
    m, n = A.shape
    x = np.array(y, dtype=np.float64)
    incr = np.zeros((m + 1, n))
    norms = np.einsum("ij,ij->i", A, A)
    residual = np.inf
    for sweep in range(1, max_sweeps + 1):
        prev = x.copy()
        for i in range(m):
            z = x + incr[i]
            viol = A[i] @ z - b[i]
            if viol > 0.0 and norms[i] > 0.0:
                incr[i] = (viol / norms[i]) * A[i]
                x = z - incr[i]
            else:
                incr[i] = 0.0
                x = z
        z = x + incr[m]
        x = np.minimum(np.maximum(z, 0.0), ubar)
        incr[m] = z - x

        change = np.max(np.abs(x - prev))
        residual = max(0.0, float(np.max(A @ x - b))) if m else 0.0
        if change <= tol and residual <= tol:
            return x, sweep, residual, True
    return x, max_sweeps, residual, False


# ---------------------------------------------------------------------------
# Multilinear extension of a set function given as a 2^n table.
# Subset S is encoded by the bitmask sum_{i in S} 2^i.
# ---------------------------------------------------------------------------


def multilinear_loops(table, x):
    n = x.shape[0]
    N = 1 << n
    grad = np.zeros(n)
    val = 0.0
    w = np.empty(n)
    pre = np.empty(n + 1)
    suf = np.empty(n + 1)
    for S in range(N):
        F = table[S]
        if F == 0.0:
            continue
        for j in range(n):
            w[j] = x[j] if (S >> j) & 1 else 1.0 - x[j]
        pre[0] = 1.0
        for j in range(n):
            pre[j + 1] = pre[j] * w[j]
        suf[n] = 1.0
        for j in range(n - 1, -1, -1):
            suf[j] = suf[j + 1] * w[j]
        val += F * pre[n]
        for j in range(n):
            loo = F * pre[j] * suf[j + 1]
            if (S >> j) & 1:
                grad[j] += loo
            else:
                grad[j] -= loo
    return val, grad


def _contract(T, x, skip):
    # contract axes in decreasing order so remaining axis indices stay valid
    out = T
    for j in range(x.shape[0] - 1, -1, -1):
        if j == skip:
            continue
        out = np.tensordot(out, np.array([1.0 - x[j], x[j]]), axes=([j], [0]))
    return out


def multilinear_numpy(table, x):
    n = x.shape[0]
    # C-order reshape puts bit n-1 on axis 0; reverse so axis j is bit j
    T = np.asarray(table, dtype=np.float64).reshape((2,) * n).transpose(tuple(range(n - 1, -1, -1)))
    val = float(_contract(T, x, -1))
    grad = np.empty(n)
    for j in range(n):
        g = _contract(T, x, j)
        grad[j] = g[1] - g[0]
    return val, grad


if HAVE_NUMBA:
    bland_simplex_jit = njit(cache=NUMBA_CACHE)(bland_simplex_loops)
    dykstra_jit = njit(cache=NUMBA_CACHE)(dykstra_loops)
    multilinear_jit = njit(cache=NUMBA_CACHE)(multilinear_loops)

    bland_simplex = bland_simplex_jit
    dykstra = dykstra_jit
    multilinear = multilinear_jit
    USING_NUMBA = True
else:  # pragma: no cover
    bland_simplex = bland_simplex_numpy
    dykstra = dykstra_numpy
    multilinear = multilinear_numpy
    USING_NUMBA = False
