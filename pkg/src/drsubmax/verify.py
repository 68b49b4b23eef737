"""Sampled property checks for DR-submodular objectives and solver traces.

Each check returns a :class:`CheckReport`; nothing here raises on a
violated property.
"""

from dataclasses import dataclass, field

import numpy as np

from .numerics import finite_diff_hessian

SLACK = 1e-8


@dataclass
class CheckReport:
    name: str
    tol: float
    seed: int = None
    checks: int = 0
    violations: list = field(default_factory=list)
    max_excess: float = -np.inf
    hypothesis_ok: bool = True
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return self.max_excess <= self.tol

    def add(self, location, excess):
        self.checks += 1
        excess = float(excess)
        self.max_excess = max(self.max_excess, excess)
        if excess > self.tol:
            self.violations.append((location, excess))

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": self.checks,
            "tol": self.tol,
            "max_excess": None if self.checks == 0 else self.max_excess,
            "seed": self.seed,
            "hypothesis_ok": self.hypothesis_ok,
            "violations": [{"location": loc, "excess": e} for loc, e in sorted(self.violations, key=lambda v: str(v[0]))],
            "notes": self.notes,
        }


def _box(obj, lower=None, upper=None):
    lo = obj.lower if lower is None else np.asarray(lower, dtype=np.float64)
    hi = obj.upper if upper is None else np.asarray(upper, dtype=np.float64)
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("sampling needs a finite box; pass lower/upper")
    return lo, hi


def check_dr_hessian(obj, samples=50, tol=1e-6, seed=0, step=1e-5, upper=None):
    """All finite-difference Hessian entries ``<= tol`` at interior samples."""
    lo, hi = _box(obj, upper=upper)
    rng = np.random.default_rng(seed)
    rep = CheckReport("dr-hessian", tol, seed)
    for s in range(samples):
        x = lo + 2 * step + rng.random(obj.n) * (hi - lo - 4 * step)
        H = finite_diff_hessian(obj.grad, x, step)
        i, j = np.unravel_index(np.argmax(H), H.shape)
        rep.add((s, int(i), int(j)), H[i, j])
    return rep


def check_weak_dr(obj, samples=200, seed=0, tol=1e-9, upper=None):
    """``f(k e_i + a) - f(a) >= f(k e_i + b) - f(b)`` for random ``a <= b``."""
    lo, hi = _box(obj, upper=upper)
    rng = np.random.default_rng(seed)
    rep = CheckReport("weak-dr", tol, seed)
    for s in range(samples):
        a = lo + rng.random(obj.n) * (hi - lo)
        b = a + rng.random(obj.n) * (hi - a)
        i = int(rng.integers(obj.n))
        k = rng.random() * (hi[i] - b[i])
        e = np.zeros(obj.n)
        e[i] = k
        gain_a = obj.value(a + e) - obj.value(a)
        gain_b = obj.value(b + e) - obj.value(b)
        rep.add((s, i), gain_b - gain_a)
    return rep


def check_lemma1(obj, mu=0.0, samples=200, seed=0, tol=SLACK, upper=None):
    """``(y - x).grad f(x) >= f(x v y) + f(x ^ y) - 2 f(x) + mu/2 ||x - y||^2``."""
    lo, hi = _box(obj, upper=upper)
    rng = np.random.default_rng(seed)
    rep = CheckReport("lemma1", tol, seed)
    for s in range(samples):
        x = lo + rng.random(obj.n) * (hi - lo)
        y = lo + rng.random(obj.n) * (hi - lo)
        lhs = (y - x) @ obj.grad(x)
        rhs = obj.value(np.maximum(x, y)) + obj.value(np.minimum(x, y)) - 2 * obj.value(x)
        rhs += 0.5 * mu * float((x - y) @ (x - y))
        rep.add(s, rhs - lhs)
    return rep


def quadratic_strong_dr_modulus(q):
    """Largest ``mu`` with ``-v^T H v >= mu ||v||^2`` for all ``v >= 0``.

    With ``H <= 0`` entrywise the cross terms only help, so the infimum over
    the non-negative orthant sits at a coordinate vector: ``min_i -H_ii``.
    """
    H = np.asarray(q.H, dtype=np.float64)
    if H.size and H.max() > 0:
        raise ValueError("modulus formula needs H <= 0 entrywise")
    return float(max(0.0, np.min(-np.diag(H))))


def check_key_claim(obj, P, xstar, trials=100, seed=0, tol=SLACK):
    """``f(x v x*) + f(x ^ x*) + f(z v z*) + f(z ^ z*) >= f(x*)``.

    ``x`` is sampled from ``P``, ``z`` from ``P`` shrunk at ``x``, and
    ``z* = x v x* - x``. The inequality needs ``f >= 0``; any negative value
    seen clears ``hypothesis_ok`` instead of counting as a violation.
    """
    xstar = np.asarray(xstar, dtype=np.float64)
    rng = np.random.default_rng(seed)
    rep = CheckReport("key-claim", tol, seed)
    fstar = obj.value(xstar)
    for s in range(trials):
        x = P.sample(rng)
        z = P.shrink(x).sample(rng)
        zstar = np.maximum(x, xstar) - x
        vals = [
            obj.value(np.maximum(x, xstar)),
            obj.value(np.minimum(x, xstar)),
            obj.value(np.maximum(z, zstar)),
            obj.value(np.minimum(z, zstar)),
        ]
        if min(vals + [fstar]) < 0:
            rep.hypothesis_ok = False
        rep.add(s, fstar - sum(vals))
    if not rep.hypothesis_ok:
        rep.notes.append("negative objective value seen; the claim assumes f >= 0")
    return rep


def check_lemma3(obj, theta, xstar, samples=200, seed=0, tol=SLACK, ubar=None):
    """``f(x v x*) >= (1 - 1/lambda') f(x*)`` for ``x in [0, theta]``.

    ``lambda' = min_i ubar_i / theta_i``.
    """
    ubar = obj.upper if ubar is None else np.asarray(ubar, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    xstar = np.asarray(xstar, dtype=np.float64)
    if np.any(theta <= 0) or np.any(theta > ubar):
        raise ValueError("theta must satisfy 0 < theta <= ubar")
    lam = float(np.min(ubar / theta))
    rng = np.random.default_rng(seed)
    rep = CheckReport("lemma3", tol, seed)
    fstar = obj.value(xstar)
    bound = (1.0 - 1.0 / lam) * fstar
    for s in range(samples):
        x = rng.random(obj.n) * theta
        val = obj.value(np.maximum(x, xstar))
        if min(val, fstar) < 0:
            rep.hypothesis_ok = False
        rep.add(s, bound - val)
    if not rep.hypothesis_ok:
        rep.notes.append("negative objective value seen; the lemma assumes f >= 0")
    return rep


def check_growth_bound(trace, ubar, gamma, tol=1e-9):
    """``x_i^(k) <= ubar_i (1 - (1 - gamma)^(t_k / gamma))`` along a trace."""
    ubar = np.asarray(ubar, dtype=np.float64)
    if len(trace) == 0 or np.any(trace.x[0] != 0):
        raise ValueError("trace does not start at the origin")
    rep = CheckReport("growth", tol)
    for k, (xk, tk) in enumerate(zip(trace.x, trace.t)):
        bound = ubar * (1.0 - (1.0 - gamma) ** (tk / gamma))
        excess = xk - bound
        i = int(np.argmax(excess))
        rep.add((k, i), excess[i])
    return rep


def check_quadratic_lower_bound(obj, L, samples=200, seed=0, tol=SLACK, upper=None):
    """``f(x + v) >= f(x) + <grad f(x), v> - L/2 ||v||^2`` for ``v >= 0`` or ``v <= 0``."""
    lo, hi = _box(obj, upper=upper)
    rng = np.random.default_rng(seed)
    rep = CheckReport("qlb", tol, seed)
    for s in range(samples):
        x = lo + rng.random(obj.n) * (hi - lo)
        if rng.random() < 0.5:
            v = rng.random(obj.n) * (hi - x)
        else:
            v = -rng.random(obj.n) * (x - lo)
        lower = obj.value(x) + obj.grad(x) @ v - 0.5 * L * float(v @ v)
        rep.add(s, lower - obj.value(x + v))
    return rep


class ShiftedObjective:
    """``f + offset`` with the same gradient; used to meet ``f >= 0`` hypotheses."""

    def __init__(self, base, offset):
        self.base = base
        self.offset = float(offset)
        self.lower, self.upper = base.lower, base.upper

    @property
    def n(self):
        return self.base.n

    def value(self, x):
        return self.base.value(x) + self.offset

    def grad(self, x):
        return self.base.grad(x)


def box_lower_bound(obj, upper):
    """Certified lower bound of ``obj`` on ``[0, upper]``, or None if unknown.

    Quadratics use the interval bound on each term. For the softmax
    extension, ``diag(x)(K - I) + I`` is similar to
    ``I - X + X^1/2 K X^1/2 >= diag(1 + x_i (lambda_min - 1))``.
    """
    from .objectives import QuadraticObjective, SoftmaxObjective

    u = np.asarray(upper, dtype=np.float64)
    if isinstance(obj, QuadraticObjective):
        lb = 0.5 * np.sum(np.minimum(obj.H * np.outer(u, u), 0.0)) + np.sum(np.minimum(obj.h * u, 0.0))
        return float(lb + obj.c)
    if isinstance(obj, SoftmaxObjective):
        lam = float(np.linalg.eigvalsh(obj.kernel)[0])
        arg = 1.0 + u * (min(lam, 1.0) - 1.0)
        if np.any(arg <= 0):
            return None
        return float(np.sum(np.log(arg)))
    return None
