"""Dense two-phase simplex for small linear programs.

Solves ``max c.x  s.t.  G x <= g,  lo <= x <= hi`` with Bland's rule, so
the pivot sequence (and hence the returned vertex) is deterministic.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .exceptions import LPInfeasibleError, LPUnboundedError, NumericalError

PIVOT_TOL = 1e-11
FEAS_TOL = 1e-9


@dataclass(frozen=True)
class LinearProgram:
    c: np.ndarray
    G: np.ndarray
    g: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=np.float64))
        n = c.size
        G = np.asarray(self.G, dtype=np.float64).reshape(-1, n)
        g = np.atleast_1d(np.asarray(self.g, dtype=np.float64)).reshape(-1)
        lo = np.broadcast_to(np.asarray(self.lo, dtype=np.float64), (n,)).copy()
        hi = np.broadcast_to(np.asarray(self.hi, dtype=np.float64), (n,)).copy()
        if G.shape[0] != g.size:
            raise ValueError(f"G has {G.shape[0]} rows but g has {g.size} entries")
        if np.any(lo > hi):
            raise ValueError("lower bounds exceed upper bounds")
        if not np.all(np.isfinite(lo)):
            raise ValueError("lower bounds must be finite")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def n(self):
        return self.c.size


def _run(T, basis):
    max_iter = 50 * (T.shape[0] + T.shape[1]) + 1000
    status, _ = _kernels.bland_simplex(T, basis, PIVOT_TOL, max_iter)
    if status == _kernels.ITERATION_LIMIT:
        raise NumericalError("simplex hit its iteration limit")
    return status


def maximize_linear(lp):
    """Return ``(v, value)`` with ``v`` an optimal vertex of ``lp``.

    Raises
    ------
    LPInfeasibleError
        If the feasible region is empty.
    LPUnboundedError
        If the objective is unbounded above.
    """
    n = lp.n
    # shift to y = x - lo >= 0
    rhs_G = lp.g - lp.G @ lp.lo
    span = lp.hi - lp.lo
    finite = np.flatnonzero(np.isfinite(span))
    rows = np.vstack([lp.G, np.eye(n)[finite]]) if finite.size else lp.G
    rhs = np.concatenate([rhs_G, span[finite]])
    p = rows.shape[0]

    neg = rhs < 0
    art_rows = np.flatnonzero(neg)
    q = art_rows.size
    ncol = n + p + q
    T = np.zeros((p + 1, ncol + 1))
    sign = np.where(neg, -1.0, 1.0)
    T[:p, :n] = rows * sign[:, None]
    T[np.arange(p), n + np.arange(p)] = sign
    T[art_rows, n + p + np.arange(q)] = 1.0
    T[:p, -1] = np.abs(rhs)
    basis = n + np.arange(p)
    basis[art_rows] = n + p + np.arange(q)

    if q:
        # phase 1: maximize -sum(artificials)
        T[p, :] = T[art_rows].sum(axis=0)
        T[p, n + p :] = 0.0
        _run(T, basis)
        infeas = T[:p, -1][basis >= n + p].sum()
        if infeas > FEAS_TOL * (1.0 + np.abs(rhs).max()):
            raise LPInfeasibleError(f"linear program is infeasible (phase-1 residual {infeas:.3e})")
        # drive zero-level artificials out of the basis, dropping redundant rows
        keep = np.ones(p, dtype=bool)
        for r in np.flatnonzero(basis >= n + p):
            cand = np.flatnonzero(np.abs(T[r, : n + p]) > PIVOT_TOL)
            if cand.size == 0:
                keep[r] = False
                continue
            j = cand[0]
            T[r] /= T[r, j]
            for i in range(p + 1):
                if i != r and T[i, j] != 0.0:
                    T[i] -= T[i, j] * T[r]
            basis[r] = j
        T = np.vstack([T[:p][keep], T[p:]])
        T = np.hstack([T[:, : n + p], T[:, -1:]])
        basis = basis[keep]
        T = np.ascontiguousarray(T)

    # phase 2 reduced profits: c_j - c_B B^-1 A_j
    cost = np.zeros(n + p)
    cost[:n] = lp.c
    m2 = T.shape[0] - 1
    T[m2, :] = 0.0
    T[m2, : n + p] = cost
    for i in range(m2):
        cb = cost[basis[i]]
        if cb != 0.0:
            T[m2] -= cb * T[i]
    if _run(T, basis) == _kernels.UNBOUNDED:
        raise LPUnboundedError("linear program is unbounded")

    y = np.zeros(n + p)
    y[basis] = T[:m2, -1]
    x = np.clip(lp.lo + y[:n], lp.lo, lp.hi)
    return x, float(lp.c @ x)
