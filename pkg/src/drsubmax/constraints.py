"""Down-closed polytopes ``{x >= 0 : A x <= b, x <= ubar}`` and their oracles."""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .exceptions import InfeasiblePointError, ProjectionError
from .lp import LinearProgram, maximize_linear

FEAS_TOL = 1e-9


def tightest_upper_bound(A, b):
    """``ubar_j = min_i b_i / A_ij`` over rows with ``A_ij > 0``.

    Zero entries impose no bound on their coordinate; a column with no
    positive entry is unbounded and rejected.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if np.any(A < 0):
        raise ValueError("constraint matrix must be non-negative")
    bound = _column_bounds(A, b)
    if A.shape[0] == 0 or not np.all(np.isfinite(bound)):
        raise ValueError("every column of A needs a positive entry to bound it")
    return bound


def _column_bounds(A, b):
    safe = np.where(A > 0, A, 1.0)
    ratios = np.where(A > 0, b[:, None] / safe, np.inf)
    return ratios.min(axis=0) if A.shape[0] else np.full(A.shape[1], np.inf)


@dataclass(frozen=True)
class DownClosedPolytope:
    """``{x : 0 <= x <= ubar, A x <= b}`` with ``A >= 0`` and ``b >= 0``.

    ``ubar`` defaults to the tightest bound implied by ``A`` and ``b``.
    ``nu`` records the smallest entry of ``A`` (``None`` for a pure box).
    """

    A: np.ndarray
    b: np.ndarray
    ubar: np.ndarray = None
    nu: float = None

    def __post_init__(self):
        A = np.asarray(self.A, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64).reshape(-1)
        if self.ubar is None:
            ubar = tightest_upper_bound(A, b)
        else:
            ubar = np.asarray(self.ubar, dtype=np.float64).reshape(-1)
        A = A.reshape(b.size, ubar.size)
        if np.any(A < 0):
            raise ValueError("constraint matrix must be non-negative")
        if np.any(b < 0):
            raise ValueError("right-hand side must be non-negative")
        if np.any(ubar < 0) or not np.all(np.isfinite(ubar)):
            raise ValueError("ubar must be finite and non-negative")
        if np.any(ubar > _column_bounds(A, b) * (1 + 1e-12) + 1e-15):
            raise ValueError("ubar exceeds the tightest bound implied by A x <= b")
        nu = float(A.min()) if A.size else None
        for name, val in (("A", A), ("b", b), ("ubar", ubar)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "nu", nu)

    @classmethod
    def box(cls, ubar):
        ubar = np.asarray(ubar, dtype=np.float64).reshape(-1)
        return cls(np.zeros((0, ubar.size)), np.zeros(0), ubar)

    @property
    def n(self):
        return self.ubar.size

    @property
    def m(self):
        return self.b.size

    def contains(self, x, tol=FEAS_TOL):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != self.ubar.shape:
            raise ValueError(f"point has shape {x.shape}, polytope dimension is {self.n}")
        if np.any(x < -tol) or np.any(x > self.ubar + tol):
            return False
        return not (self.m and np.any(self.A @ x > self.b + tol))

    def violation(self, x):
        """Largest constraint violation of ``x`` (0 when feasible)."""
        x = np.asarray(x, dtype=np.float64)
        parts = [0.0, float(np.max(-x)), float(np.max(x - self.ubar))]
        if self.m:
            parts.append(float(np.max(self.A @ x - self.b)))
        return max(parts)

    def shrink(self, x):
        """``P ∩ {y : y <= ubar - x}`` for a feasible ``x``."""
        x = np.asarray(x, dtype=np.float64)
        if not self.contains(x):
            raise InfeasiblePointError("cannot shrink around an infeasible point")
        return DownClosedPolytope(self.A, self.b, np.clip(self.ubar - x, 0.0, self.ubar))

    def lmo(self, direction):
        """``argmax_{v in P} <v, direction>``."""
        d = np.asarray(direction, dtype=np.float64)
        if d.shape != self.ubar.shape:
            raise ValueError(f"direction has shape {d.shape}, polytope dimension is {self.n}")
        if self.m == 0:
            return np.where(d > 0, self.ubar, 0.0)
        v, _ = maximize_linear(LinearProgram(d, self.A, self.b, np.zeros(self.n), self.ubar))
        return v

    def shrunken_lmo(self, x, direction):
        """LMO over ``P`` with the extra constraint ``v <= ubar - x``."""
        x = np.asarray(x, dtype=np.float64)
        if np.any(x < -FEAS_TOL) or np.any(x > self.ubar + FEAS_TOL):
            raise InfeasiblePointError("shrunken LMO needs x inside [0, ubar]")
        hi = np.clip(self.ubar - x, 0.0, self.ubar)
        return DownClosedPolytope(self.A, self.b, hi).lmo(direction)

    def project(self, y, tol=1e-8, max_sweeps=10000):
        """Euclidean projection by Dykstra's method over the halfspaces and box."""
        y = np.asarray(y, dtype=np.float64)
        if self.m == 0:
            return np.clip(y, 0.0, self.ubar)
        x, sweeps, residual, ok = _kernels.dykstra(
            y.copy(), np.ascontiguousarray(self.A), self.b.copy(), self.ubar.copy(), tol, max_sweeps
        )
        if not ok:
            raise ProjectionError(
                f"Dykstra projection did not converge in {sweeps} sweeps (residual {residual:.3e})",
                residual,
            )
        return x

    def diameter_bound(self):
        return float(np.linalg.norm(self.ubar))

    def sample(self, rng, size=None):
        """Random feasible points: uniform in the box, scaled back into ``P``.

        Down-closedness makes the scaled point feasible.
        """
        k = 1 if size is None else size
        X = rng.random((k, self.n)) * self.ubar
        if self.m:
            load = X @ self.A.T
            with np.errstate(divide="ignore", invalid="ignore"):
                scale = np.where(load > 0, self.b / load, np.inf).min(axis=1)
            X *= np.minimum(1.0, scale)[:, None]
        return X[0] if size is None else X

    def to_dict(self):
        return {
            "A": self.A.tolist(),
            "b": self.b.tolist(),
            "ubar": self.ubar.tolist(),
            "nu": self.nu,
        }

    @classmethod
    def from_dict(cls, d):
        ubar = np.asarray(d["ubar"], dtype=np.float64)
        A = np.asarray(d["A"], dtype=np.float64).reshape(-1, ubar.size)
        return cls(A, d["b"], ubar)


def contains(P, x, tol=FEAS_TOL):
    return P.contains(x, tol)


def shrink(P, x):
    return P.shrink(x)


def lmo(P, direction):
    return P.lmo(direction)


def shrunken_lmo(P, x, direction):
    return P.shrunken_lmo(x, direction)


def project(P, y, tol=1e-8, max_sweeps=10000):
    return P.project(y, tol, max_sweeps)


def diameter_bound(P):
    return P.diameter_bound()
