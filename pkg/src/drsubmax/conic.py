"""Orthant conic lattices K_alpha and the sign-flip reduction.

For a sign vector ``alpha`` the ordering is ``a <= b`` iff
``alpha_i a_i <= alpha_i b_i`` for all ``i``; flipping coordinates with
``alpha_i = -1`` turns a K_alpha-DR-submodular problem into an ordinary
DR-submodular one.
"""

from dataclasses import dataclass, field

import numpy as np

from .constraints import DownClosedPolytope
from .numerics import finite_diff_hessian
from .objectives import Objective


def as_sign_vector(alpha):
    alpha = np.asarray(alpha, dtype=np.float64).reshape(-1)
    if not np.all(np.abs(alpha) == 1):
        raise ValueError("sign vector entries must be +1 or -1")
    return alpha


def join_alpha(a, b, alpha):
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    alpha = as_sign_vector(alpha)
    if not a.shape == b.shape == alpha.shape:
        raise ValueError("dimension mismatch")
    return alpha * np.maximum(alpha * a, alpha * b)


def meet_alpha(a, b, alpha):
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    alpha = as_sign_vector(alpha)
    if not a.shape == b.shape == alpha.shape:
        raise ValueError("dimension mismatch")
    return alpha * np.minimum(alpha * a, alpha * b)


def infer_sign_vector(data):
    """Common sign of each data column (+1 for all-zero columns)."""
    Z = np.atleast_2d(np.asarray(data, dtype=np.float64))
    alpha = np.ones(Z.shape[1])
    for i in range(Z.shape[1]):
        col = Z[:, i]
        pos, neg = np.any(col > 0), np.any(col < 0)
        if pos and neg:
            raise ValueError(f"column {i} has entries of both signs")
        if neg:
            alpha[i] = -1.0
    return alpha


class FlippedObjective(Objective):
    """``f(x) = g(alpha * x)`` on ``[0, alpha * ybar]``."""

    def __init__(self, base, alpha, ybar):
        alpha = as_sign_vector(alpha)
        upper = alpha * np.asarray(ybar, dtype=np.float64)
        if np.any(upper < 0):
            raise ValueError("ybar must lie in the K_alpha cone")
        super().__init__(np.zeros(alpha.size), upper)
        self.base = base
        self.alpha = alpha
        self.ybar = np.asarray(ybar, dtype=np.float64)
        self.lipschitz_hint = base.lipschitz_hint

    def value(self, x):
        return self.base.value(self.alpha * self._check_dim(x))

    def grad(self, x):
        return self.alpha * self.base.grad(self.alpha * self._check_dim(x))

    def value_batch(self, X):
        return self.base.value_batch(np.asarray(X) * self.alpha)


def flip_reduce(obj, alpha, M=None, b=None, ybar=None):
    """Map ``max g(y)`` over ``{M y <= b, 0 <=_K y <=_K ybar}`` to x-space.

    Returns ``(f, P)`` with ``f(x) = g(alpha * x)`` and
    ``P = {x >= 0 : (M diag(alpha)) x <= b, x <= alpha * ybar}``. ``ybar``
    defaults to the K_alpha-upper corner of ``obj``'s domain box.
    """
    alpha = as_sign_vector(alpha)
    if alpha.size != obj.n:
        raise ValueError("sign vector and objective dimensions differ")
    if ybar is None:
        ybar = np.where(alpha > 0, obj.upper, obj.lower)
    ybar = np.asarray(ybar, dtype=np.float64)
    f = FlippedObjective(obj, alpha, ybar)
    if M is None:
        return f, DownClosedPolytope.box(f.upper)
    A = np.atleast_2d(np.asarray(M, dtype=np.float64)) * alpha
    if np.any(A < 0):
        raise ValueError("M diag(alpha) has negative entries; constraints are not sign-consistent")
    bound = np.minimum(f.upper, _bound(A, np.asarray(b, dtype=np.float64)))
    return f, DownClosedPolytope(A, b, bound)


def _bound(A, b):
    safe = np.where(A > 0, A, 1.0)
    return np.where(A > 0, b[:, None] / safe, np.inf).min(axis=0)


@dataclass
class KAlphaReport:
    samples: int
    offdiag_violations: int = 0
    diag_violations: int = 0
    max_excess: float = 0.0
    max_offdiag_excess: float = 0.0
    max_diag_excess: float = 0.0
    locations: list = field(default_factory=list)

    @property
    def ksubmodular(self):
        """No off-diagonal violations: K_alpha-submodular on the samples."""
        return self.offdiag_violations == 0

    @property
    def kdr(self):
        """No violations at all: K_alpha-DR-submodular on the samples."""
        return self.offdiag_violations == 0 and self.diag_violations == 0

    def to_dict(self):
        return {
            "samples": self.samples,
            "offdiag_violations": self.offdiag_violations,
            "diag_violations": self.diag_violations,
            "max_excess": self.max_excess,
            "max_offdiag_excess": self.max_offdiag_excess,
            "max_diag_excess": self.max_diag_excess,
            "ksubmodular": self.ksubmodular,
            "kdr": self.kdr,
        }


def verify_kalpha(obj, alpha, samples=50, tol=1e-6, seed=0, step=1e-5):
    """Sample ``alpha_i alpha_j d2f/dx_i dx_j`` and count entries above ``tol``.

    Off-diagonal counts probe K_alpha-submodularity; diagonal counts are
    reported separately since only K_alpha-DR needs them.
    """
    alpha = as_sign_vector(alpha)
    rng = np.random.default_rng(seed)
    lo = obj.lower + 2 * step
    hi = obj.upper - 2 * step
    sign = np.outer(alpha, alpha)
    off = ~np.eye(obj.n, dtype=bool)
    rep = KAlphaReport(samples)
    for s in range(samples):
        x = lo + rng.random(obj.n) * (hi - lo)
        excess = sign * finite_diff_hessian(obj.grad, x, step)
        bad = excess > tol
        rep.offdiag_violations += int(np.sum(bad & off)) // 2
        rep.diag_violations += int(np.sum(np.diag(bad)))
        rep.max_offdiag_excess = max(rep.max_offdiag_excess, float(np.max(excess[off], initial=0.0)))
        rep.max_diag_excess = max(rep.max_diag_excess, float(np.max(np.diag(excess))))
        for i, j in zip(*np.nonzero(np.triu(bad))):
            rep.locations.append((s, int(i), int(j), float(excess[i, j])))
    rep.max_excess = max(rep.max_offdiag_excess, rep.max_diag_excess)
    return rep
