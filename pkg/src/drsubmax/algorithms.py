"""Frank-Wolfe style solvers for constrained DR-submodular maximization.

All solvers return a :class:`Trace` alongside their answer.
"""

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .constraints import FEAS_TOL, DownClosedPolytope
from .exceptions import InfeasiblePointError


@dataclass
class Trace:
    """Per-iteration record: iterate, direction, step, cumulative step, f, g.

    ``g`` holds NaN where the non-stationarity was not computed.
    """

    x: list = field(default_factory=list)
    v: list = field(default_factory=list)
    gamma: list = field(default_factory=list)
    t: list = field(default_factory=list)
    f: list = field(default_factory=list)
    g: list = field(default_factory=list)

    def record(self, x, v, gamma, t, f, g=np.nan):
        self.x.append(np.array(x, dtype=np.float64))
        self.v.append(None if v is None else np.array(v, dtype=np.float64))
        self.gamma.append(float(gamma))
        self.t.append(float(t))
        self.f.append(float(f))
        self.g.append(float(g))

    def __len__(self):
        return len(self.x)

    @property
    def iterates(self):
        return np.array(self.x)

    def to_csv(self, header_lines=()):
        """CSV text with columns k, t, gamma, f, g (LF line endings)."""
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "t", "gamma", "f", "g"])
        for k in range(len(self)):
            g = "" if np.isnan(self.g[k]) else repr(self.g[k])
            w.writerow([k, repr(self.t[k]), repr(self.gamma[k]), repr(self.f[k]), g])
        return buf.getvalue()

    def to_json(self):
        return json.dumps(
            {
                "x": [xk.tolist() for xk in self.x],
                "v": [None if vk is None else vk.tolist() for vk in self.v],
                "gamma": self.gamma,
                "t": self.t,
                "f": self.f,
                "g": [None if np.isnan(gk) else gk for gk in self.g],
            }
        )


def nonstationarity(obj, Q, x):
    """``g_Q(x) = max_{v in Q} <v - x, grad f(x)>``."""
    x = np.asarray(x, dtype=np.float64)
    if not Q.contains(x):
        raise InfeasiblePointError("non-stationarity is defined for feasible points only")
    grad = obj.grad(x)
    v = Q.lmo(grad)
    return float((v - x) @ grad)


def nonconvex_frank_wolfe(obj, Q, K=100, eps=1e-6, x0=None):
    """Frank-Wolfe for non-convex objectives returning the least-stationary iterate.

    Runs iterations k = 0..K; stops as soon as the Frank-Wolfe gap
    ``g_k = <v_k - x_k, grad f(x_k)>`` drops to ``eps``. Quadratics take the
    exact line-search step, everything else ``2 / (k + 2)``.

    Returns
    -------
    x_best : ndarray
        Iterate with the smallest recorded ``g_k``.
    g_min : float
    trace : Trace
    """
    x = np.zeros(Q.n) if x0 is None else np.array(x0, dtype=np.float64)
    if not Q.contains(x):
        raise InfeasiblePointError("starting point is not feasible")
    line_search = getattr(obj, "line_search", None)
    trace = Trace()
    t = 0.0
    best = 0
    for k in range(K + 1):
        grad = obj.grad(x)
        v = Q.lmo(grad)
        d = v - x
        gap = float(d @ grad)
        if line_search is not None:
            gamma = line_search(x, d)
        else:
            gamma = 2.0 / (k + 2.0)
        stop = gap <= eps or k == K
        trace.record(x, v, 0.0 if stop else gamma, t, obj.value(x), gap)
        if gap < trace.g[best]:
            best = k
        if stop:
            break
        x = x + gamma * d
        t += gamma
    return trace.x[best].copy(), trace.g[best], trace


@dataclass
class TwoPhaseConfig:
    K1: int = 100
    K2: int = 100
    eps1: float = 1e-6
    eps2: float = 1e-6
    x0: np.ndarray = None
    z0: np.ndarray = None

    def __post_init__(self):
        if self.K1 < 1 or self.K2 < 1:
            raise ValueError("iteration budgets must be >= 1")
        if self.eps1 < 0 or self.eps2 < 0:
            raise ValueError("stopping tolerances must be >= 0")


@dataclass
class TwoPhaseResult:
    x_best: np.ndarray
    winner: str  # "x" (phase 1) or "z" (phase 2)
    x: np.ndarray
    z: np.ndarray
    g_P: float
    g_Q: float
    Q: DownClosedPolytope
    trace1: Trace
    trace2: Trace
    f_x: float
    f_z: float

    @property
    def value(self):
        return max(self.f_x, self.f_z)


def two_phase_fw(obj, P, cfg=None):
    """Two-phase Frank-Wolfe: a stationary point in P, then one in the shrunken set.

    Phase 2 searches ``Q = P ∩ {y <= ubar - x}``; the better of the two
    points is returned (ties go to the phase-1 point).
    """
    cfg = TwoPhaseConfig() if cfg is None else cfg
    x, g_P, tr1 = nonconvex_frank_wolfe(obj, P, cfg.K1, cfg.eps1, cfg.x0)
    Q = P.shrink(x)
    z0 = np.zeros(P.n) if cfg.z0 is None else np.minimum(np.asarray(cfg.z0, dtype=np.float64), Q.ubar)
    z, g_Q, tr2 = nonconvex_frank_wolfe(obj, Q, cfg.K2, cfg.eps2, z0)
    fx, fz = obj.value(x), obj.value(z)
    winner = "z" if fz > fx else "x"
    return TwoPhaseResult(
        x_best=(z if winner == "z" else x).copy(),
        winner=winner,
        x=x,
        z=z,
        g_P=g_P,
        g_Q=g_Q,
        Q=Q,
        trace1=tr1,
        trace2=tr2,
        f_x=fx,
        f_z=fz,
    )


def nonmonotone_fw(obj, P, gamma=0.01):
    """Frank-Wolfe variant with the shrunken LMO and uniform step ``gamma``.

    Starts at 0 and adds ``gamma_k * v_k`` until the cumulative step reaches
    exactly 1, so the output is a convex combination of LMO outputs.
    """
    if not 0 < gamma <= 1:
        raise ValueError("step size must lie in (0, 1]")
    x = np.zeros(P.n)
    t = 0.0
    trace = Trace()
    while t < 1.0:
        grad = obj.grad(x)
        v = P.shrunken_lmo(x, grad)
        rest = 1.0 - t
        # snap the last step so t lands on 1 exactly despite rounding drift
        step = rest if rest - gamma <= 1e-9 * gamma else gamma
        trace.record(x, v, step, t, obj.value(x))
        x = x + step * v
        t = t + step
    trace.record(x, None, 0.0, t, obj.value(x))
    return x, trace


def projected_gradient_ascent(obj, P, iterations=100, tol=1e-8, max_sweeps=10000):
    """Projected gradient ascent from 0 with step ``1 / (k + 1)``."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    x = np.zeros(P.n)
    trace = Trace()
    t = 0.0
    for k in range(iterations):
        step = 1.0 / (k + 1)
        trace.record(x, None, step, t, obj.value(x))
        x = P.project(x + step * obj.grad(x), tol, max_sweeps)
        t += step
    trace.record(x, None, 0.0, t, obj.value(x))
    return x, trace


def is_trace_feasible(trace, P, tol=FEAS_TOL):
    return all(P.contains(xk, tol) for xk in trace.x)
