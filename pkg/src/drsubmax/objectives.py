"""Objective families maximized by the solvers.

Every objective exposes ``value(x)``, ``grad(x)`` and a domain box
``[lower, upper]``. ``lipschitz_hint`` and ``strong_dr_hint`` are optional
known constants (``None`` when unknown).
"""

from abc import ABC, abstractmethod

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.special import entr, expit

from .exceptions import NumericalError, NotSPDError
from .numerics import check_symmetric
from . import _kernels

MEANFIELD_MAX_N = 20


class Objective(ABC):
    lipschitz_hint = None
    strong_dr_hint = None

    def __init__(self, lower, upper):
        self.lower = np.asarray(lower, dtype=np.float64)
        self.upper = np.asarray(upper, dtype=np.float64)

    @property
    def n(self):
        return self.lower.size

    @abstractmethod
    def value(self, x):
        """Objective value at ``x``."""

    @abstractmethod
    def grad(self, x):
        """Gradient at ``x``."""

    def value_batch(self, X):
        """Values at the rows of ``X``."""
        return np.array([self.value(x) for x in np.asarray(X)])

    def __call__(self, x):
        return self.value(x)

    def __neg__(self):
        return NegatedObjective(self)

    def _check_dim(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise ValueError(f"expected a point of shape ({self.n},), got {x.shape}")
        return x

    def to_dict(self):
        raise NotImplementedError(f"{type(self).__name__} is not serializable")


class NegatedObjective(Objective):
    """``-f``; turns a loss into something to maximize."""

    def __init__(self, base):
        super().__init__(base.lower, base.upper)
        self.base = base
        self.lipschitz_hint = base.lipschitz_hint

    def value(self, x):
        return -self.base.value(x)

    def grad(self, x):
        return -self.base.grad(x)

    def value_batch(self, X):
        return -self.base.value_batch(X)

    def __neg__(self):
        return self.base

    def to_dict(self):
        return {"kind": "negated", "base": self.base.to_dict()}


class QuadraticObjective(Objective):
    """``f(x) = 0.5 x^T H x + h^T x + c`` with ``H <= 0`` entrywise.

    ``require_dr=False`` skips the sign check so that a non-DR quadratic can
    be loaded and diagnosed.
    """

    def __init__(self, H, h, c=0.0, upper=None, require_dr=True):
        H = check_symmetric(H, name="H")
        h = np.asarray(h, dtype=np.float64).reshape(-1)
        if h.size != H.shape[0]:
            raise ValueError("H and h dimensions differ")
        if require_dr and H.size and H.max() > 0:
            raise ValueError("H must have non-positive entries (DR-submodularity)")
        n = h.size
        upper = np.full(n, np.inf) if upper is None else np.broadcast_to(upper, (n,))
        super().__init__(np.zeros(n), upper)
        self.H = H
        self.h = h
        self.c = float(c)
        self.lipschitz_hint = float(np.linalg.norm(H, "fro"))
        if n and H.max() <= 0:
            self.strong_dr_hint = float(max(0.0, np.min(-np.diag(H))))

    def value(self, x):
        x = self._check_dim(x)
        return float(0.5 * x @ self.H @ x + self.h @ x + self.c)

    def grad(self, x):
        x = self._check_dim(x)
        return self.H @ x + self.h

    def value_batch(self, X):
        X = np.asarray(X, dtype=np.float64)
        return 0.5 * np.einsum("ij,ij->i", X @ self.H, X) + X @ self.h + self.c

    def line_search(self, x, d):
        """Step in [0, 1] maximizing ``f(x + gamma d)`` (closed form)."""
        x = self._check_dim(x)
        d = self._check_dim(d)
        slope = float(d @ self.grad(x))
        curv = float(d @ self.H @ d)
        if curv < -1e-14 * (1.0 + abs(slope)):
            return float(np.clip(-slope / curv, 0.0, 1.0))
        # flat or convex along d: best endpoint
        return 1.0 if slope + 0.5 * curv > 0 else 0.0

    def to_dict(self):
        return {
            "kind": "quadratic",
            "H": self.H.tolist(),
            "h": self.h.tolist(),
            "c": self.c,
            "upper": _finite_or_none(self.upper),
        }


class SoftmaxObjective(Objective):
    """``f(x) = log det(diag(x)(K - I) + I)`` on ``[0, 1]^n`` for PSD ``K``."""

    def __init__(self, kernel, psd_eps=1e-10):
        K = check_symmetric(kernel, name="kernel")
        n = K.shape[0]
        try:
            np.linalg.cholesky(K + psd_eps * (1.0 + np.abs(K).max()) * np.eye(n))
        except np.linalg.LinAlgError as exc:
            raise NotSPDError("DPP kernel is not positive semidefinite") from exc
        super().__init__(np.zeros(n), np.ones(n))
        self.kernel = K
        self._D = K - np.eye(n)

    def _matrix(self, x):
        return x[:, None] * self._D + np.eye(self.n)

    def value(self, x):
        x = self._check_dim(x)
        sign, logdet = np.linalg.slogdet(self._matrix(x))
        if sign <= 0:
            raise NumericalError("softmax extension: non-positive determinant")
        return float(logdet)

    def value_batch(self, X):
        X = np.asarray(X, dtype=np.float64)
        M = X[:, :, None] * self._D[None] + np.eye(self.n)[None]
        sign, logdet = np.linalg.slogdet(M)
        if np.any(sign <= 0):
            raise NumericalError("softmax extension: non-positive determinant")
        return logdet

    def grad(self, x):
        # grad_i = <row i of (K - I), column i of M^{-1}>
        x = self._check_dim(x)
        try:
            lu = lu_factor(self._matrix(x), check_finite=False)
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise NumericalError("softmax extension: singular system") from exc
        if np.any(np.diag(lu[0]) == 0):
            raise NumericalError("softmax extension: singular system")
        C = lu_solve(lu, np.eye(self.n), check_finite=False)
        return np.einsum("ik,ki->i", self._D, C)

    def to_dict(self):
        return {"kind": "softmax", "kernel": self.kernel.tolist()}


class MeanFieldObjective(Objective):
    """Negative KL to a probabilistic submodular model, up to ``log Z``.

    ``value(x) = sum_S q_x(S) F(S) + sum_i Hb(x_i)`` where ``q_x`` is the
    product distribution with marginals ``x`` and ``Hb`` the binary entropy.
    ``table[S]`` holds ``F(S)`` with ``S`` encoded as a bitmask (bit ``i``
    set iff element ``i`` is in ``S``).
    """

    def __init__(self, table, delta=1e-9):
        table = np.asarray(table, dtype=np.float64).reshape(-1)
        n = int(round(np.log2(table.size))) if table.size else -1
        if n < 1 or (1 << n) != table.size:
            raise ValueError("table length must be 2^n with n >= 1")
        if n > MEANFIELD_MAX_N:
            raise ValueError(f"mean-field objective supports n <= {MEANFIELD_MAX_N}, got {n}")
        super().__init__(np.zeros(n), np.ones(n))
        self.table = table
        self.delta = float(delta)

    def _clamp(self, x):
        return np.clip(x, self.delta, 1.0 - self.delta)

    def value(self, x):
        x = self._check_dim(x)
        ml, _ = _kernels.multilinear(self.table, np.clip(x, 0.0, 1.0))
        xc = self._clamp(x)
        return float(ml + np.sum(entr(xc) + entr(1.0 - xc)))

    def grad(self, x):
        x = self._check_dim(x)
        _, g = _kernels.multilinear(self.table, np.clip(x, 0.0, 1.0))
        xc = self._clamp(x)
        return g + np.log1p(-xc) - np.log(xc)

    def to_dict(self):
        return {"kind": "meanfield", "table": self.table.tolist(), "delta": self.delta}


REGULARIZERS = ("rational", "capped")


class LogisticObjective(Objective):
    """Regularized logistic loss (a quantity to minimize).

    ``l(x) = mean_j log(1 + exp(-y_j <x, z_j>)) + lam * sum_i r(x_i)`` with
    ``r(t) = gamma t^2 / (1 + gamma t^2)`` ("rational") or
    ``r(t) = min(gamma t^2, 1)`` ("capped"). Use ``-obj`` to maximize.
    """

    def __init__(self, data, labels, lam=0.1, regularizer="rational", gamma=1.0, lower=None, upper=None):
        Z = np.atleast_2d(np.asarray(data, dtype=np.float64))
        y = np.asarray(labels, dtype=np.float64).reshape(-1)
        if y.size != Z.shape[0]:
            raise ValueError("one label per data row required")
        if not np.all(np.abs(y) == 1):
            raise ValueError("labels must be +1 or -1")
        if regularizer not in REGULARIZERS:
            raise ValueError(f"regularizer must be one of {REGULARIZERS}")
        for i in range(Z.shape[1]):
            col = Z[:, i]
            if np.any(col > 0) and np.any(col < 0):
                raise ValueError(f"data column {i} mixes signs")
        n = Z.shape[1]
        lower = -np.ones(n) if lower is None else np.broadcast_to(lower, (n,))
        upper = np.ones(n) if upper is None else np.broadcast_to(upper, (n,))
        super().__init__(lower, upper)
        self.data = Z
        self.labels = y
        self.lam = float(lam)
        self.regularizer = regularizer
        self.gamma = float(gamma)

    def _reg(self, x):
        q = self.gamma * x * x
        if self.regularizer == "rational":
            return q / (1.0 + q)
        return np.minimum(q, 1.0)

    def _reg_grad(self, x):
        q = self.gamma * x * x
        if self.regularizer == "rational":
            return 2.0 * self.gamma * x / (1.0 + q) ** 2
        # quadratic branch at the kink
        return np.where(q <= 1.0, 2.0 * self.gamma * x, 0.0)

    def value(self, x):
        x = self._check_dim(x)
        margins = self.labels * (self.data @ x)
        return float(np.mean(np.logaddexp(0.0, -margins)) + self.lam * np.sum(self._reg(x)))

    def grad(self, x):
        x = self._check_dim(x)
        margins = self.labels * (self.data @ x)
        w = -self.labels * expit(-margins)
        return self.data.T @ w / self.data.shape[0] + self.lam * self._reg_grad(x)

    def to_dict(self):
        return {
            "kind": "logistic",
            "data": self.data.tolist(),
            "labels": self.labels.tolist(),
            "lam": self.lam,
            "regularizer": self.regularizer,
            "gamma": self.gamma,
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
        }


def _finite_or_none(v):
    return v.tolist() if np.all(np.isfinite(v)) else None


def objective_from_dict(d):
    kind = d.get("kind")
    if kind == "quadratic":
        return QuadraticObjective(d["H"], d["h"], d.get("c", 0.0), d.get("upper"), require_dr=False)
    if kind == "softmax":
        return SoftmaxObjective(d["kernel"])
    if kind == "meanfield":
        return MeanFieldObjective(d["table"], d.get("delta", 1e-9))
    if kind == "logistic":
        return LogisticObjective(
            d["data"], d["labels"], d["lam"], d["regularizer"], d["gamma"], d.get("lower"), d.get("upper")
        )
    if kind == "negated":
        return NegatedObjective(objective_from_dict(d["base"]))
    raise ValueError(f"unknown objective kind {kind!r}")


def estimate_lipschitz(obj, samples=100, seed=0):
    """Gradient Lipschitz constant.

    Quadratics return ``||H||_F`` (an upper bound on the spectral norm).
    Otherwise the largest ``||grad f(x) - grad f(y)|| / ||x - y||`` over all
    pairs of ``samples`` uniform points of the domain box.
    """
    if isinstance(obj, QuadraticObjective):
        return obj.lipschitz_hint
    if samples < 2:
        raise ValueError("need at least two samples")
    if not (np.all(np.isfinite(obj.lower)) and np.all(np.isfinite(obj.upper))):
        raise ValueError("sampling needs a finite domain box")
    rng = np.random.default_rng(seed)
    X = obj.lower + rng.random((samples, obj.n)) * (obj.upper - obj.lower)
    G = np.array([obj.grad(x) for x in X])
    best = 0.0
    for i in range(samples):
        dx = np.linalg.norm(X[i + 1 :] - X[i], axis=1)
        dg = np.linalg.norm(G[i + 1 :] - G[i], axis=1)
        ok = dx > 0
        if np.any(ok):
            best = max(best, float(np.max(dg[ok] / dx[ok])))
    return best
