"""Seeded synthetic instances, the desk-scale optimum oracle, and JSON I/O."""

import json
from dataclasses import dataclass, field

import numpy as np

from .algorithms import nonconvex_frank_wolfe
from .constraints import DownClosedPolytope, tightest_upper_bound
from .exceptions import SchemaError
from .numerics import random_orthogonal
from .objectives import QuadraticObjective, SoftmaxObjective, objective_from_dict

SCHEMA_VERSION = 1
NU = 0.01
GRID_MAX_N = 6


@dataclass
class Instance:
    objective: object
    polytope: DownClosedPolytope
    generator: str
    seed: int
    params: dict = field(default_factory=dict)
    alpha: np.ndarray = None

    def to_dict(self):
        d = {
            "schema": SCHEMA_VERSION,
            "generator": self.generator,
            "seed": self.seed,
            "params": self.params,
            "objective": self.objective.to_dict(),
            "polytope": self.polytope.to_dict(),
        }
        if self.alpha is not None:
            d["alpha"] = [int(a) for a in self.alpha]
        return d


def _streams(seed, k):
    """``k`` independent PCG64 generators split from one seed."""
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(k)]


def _uniform(rng, shape, lo, hi):
    return lo + (hi - lo) * rng.random(shape)


def _exponential(rng, shape, rate):
    # inverse CDF keeps the stream layout identical to the uniform sampler
    return -np.log1p(-rng.random(shape)) / rate


def _polytope(rng, n, m, dist, b_value):
    if dist == "uniform":
        A = _uniform(rng, (m, n), NU, NU + 1.0)
    elif dist == "exponential":
        A = _exponential(rng, (m, n), 0.25) + NU
    else:
        raise ValueError(f"unknown distribution {dist!r}")
    b = np.full(m, float(b_value))
    return A, b


def nonneg_offset_bound(H, h, ubar):
    """Offset ``c`` making ``0.5 x^T H x + h^T x + c >= 0`` on ``[0, ubar]``.

    Uses the interval lower bound
    ``LB = 0.5 sum_ij min(H_ij u_i u_j, 0) + sum_i min(h_i u_i, 0)`` and
    returns ``-LB + 0.1 |LB|``.
    """
    H = np.asarray(H, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    u = np.asarray(ubar, dtype=np.float64)
    lb = 0.5 * np.sum(np.minimum(H * np.outer(u, u), 0.0)) + np.sum(np.minimum(h * u, 0.0))
    return float(-lb + 0.1 * abs(lb))


def _quadratic(H, A, b, generator, seed, params):
    ubar = tightest_upper_bound(A, b)
    P = DownClosedPolytope(A, b, ubar)
    h = -0.2 * H.T @ ubar
    c = nonneg_offset_bound(H, h, ubar)
    return Instance(QuadraticObjective(H, h, c, upper=ubar), P, generator, seed, params)


def gen_quadratic_uniform(n, m, seed):
    """Quadratic with H ~ U[-1, 0] (symmetrized) and A ~ U[nu, nu + 1], b = 1."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    rH, rA = _streams(seed, 2)
    H = _uniform(rH, (n, n), -1.0, 0.0)
    H = 0.5 * (H + H.T)
    A, b = _polytope(rA, n, m, "uniform", 1.0)
    params = {"n": n, "m": m, "nu": NU, "b": 1.0, "distribution": "uniform"}
    return _quadratic(H, A, b, "quad-uniform", seed, params)


def gen_quadratic_exponential(n, m, seed):
    """Quadratic with -H ~ Exp(1) (symmetrized) and A ~ Exp(0.25) + nu, b = 1."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    rH, rA = _streams(seed, 2)
    H = -_exponential(rH, (n, n), 1.0)
    H = 0.5 * (H + H.T)
    A, b = _polytope(rA, n, m, "exponential", 1.0)
    params = {"n": n, "m": m, "nu": NU, "b": 1.0, "distribution": "exponential"}
    return _quadratic(H, A, b, "quad-exp", seed, params)


def gen_softmax(n, m, seed, polytope="uniform"):
    """Softmax extension of a random DPP kernel ``U diag(d) U^T``, d ~ U[0, 1.5].

    The polytope follows the quadratic recipe with ``b = 2``; ``ubar`` is
    further capped at 1, the edge of the softmax domain.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    rd, rU, rA = _streams(seed, 3)
    d = _uniform(rd, n, 0.0, 1.5)
    U = random_orthogonal(n, rU)
    K = (U * d) @ U.T
    K = 0.5 * (K + K.T)
    A, b = _polytope(rA, n, m, polytope, 2.0)
    ubar = np.minimum(tightest_upper_bound(A, b), 1.0)
    params = {"n": n, "m": m, "nu": NU, "b": 2.0, "distribution": polytope, "eigenvalues": d.tolist()}
    return Instance(SoftmaxObjective(K), DownClosedPolytope(A, b, ubar), "softmax", seed, params)


GENERATORS = {
    "quad-uniform": gen_quadratic_uniform,
    "quad-exp": gen_quadratic_exponential,
    "softmax": gen_softmax,
}


def generate(kind, n, m, seed):
    try:
        gen = GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown instance kind {kind!r}; choose from {sorted(GENERATORS)}") from None
    return gen(n, m, seed)


@dataclass
class OracleResult:
    x: np.ndarray
    value: float
    grid_value: float
    grid_used: bool
    grid_points: int
    feasible_grid_points: int


def _grid_best(obj, P, k, chunk=1 << 17):
    n = P.n
    axes = [np.linspace(0.0, u, k) for u in P.ubar]
    total = k**n
    best_val, best_x, feasible = -np.inf, None, 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        digits = np.unravel_index(idx, (k,) * n)
        X = np.column_stack([axes[j][digits[j]] for j in range(n)])
        if P.m:
            X = X[np.all(X @ P.A.T <= P.b + 1e-9, axis=1)]
        if X.shape[0] == 0:
            continue
        feasible += X.shape[0]
        vals = obj.value_batch(X)
        i = int(np.argmax(vals))
        # strict > keeps the lexicographically first point on ties
        if vals[i] > best_val:
            best_val, best_x = float(vals[i]), X[i].copy()
    return best_x, best_val, total, feasible


def brute_force_opt(obj, P, grid_points_per_axis=21, polish_restarts=20, seed=0, polish_iters=100):
    """Best feasible point found by grid search plus Frank-Wolfe polishing.

    The value is a certified lower bound on the true maximum. The grid phase
    runs for ``n <= 6`` only; above that only random-start polishing runs
    and ``grid_used`` is False.
    """
    rng = np.random.default_rng(seed)
    starts = []
    grid_used = P.n <= GRID_MAX_N
    if grid_used:
        gx, gval, total, feasible = _grid_best(obj, P, grid_points_per_axis)
        starts.append(gx)
    else:
        gval, total, feasible = -np.inf, 0, 0
    starts.extend(P.sample(rng, polish_restarts) if polish_restarts else [])
    best_x, best_val = None, -np.inf
    if grid_used:
        best_x, best_val = starts[0].copy(), gval
    for x0 in starts:
        _, _, trace = nonconvex_frank_wolfe(obj, P, polish_iters, 1e-12, x0)
        k = int(np.argmax(trace.f))
        if trace.f[k] > best_val:
            best_x, best_val = trace.x[k].copy(), trace.f[k]
    if best_x is None:
        best_x, best_val = np.zeros(P.n), obj.value(np.zeros(P.n))
    return OracleResult(best_x, float(best_val), float(gval), grid_used, total, feasible)


def save_instance(instance, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(instance.to_dict(), fh, indent=1)
        fh.write("\n")


def instance_from_dict(d):
    if not isinstance(d, dict):
        raise SchemaError("instance file must hold a JSON object")
    if d.get("schema") != SCHEMA_VERSION:
        raise SchemaError(f"instance schema version {d.get('schema')!r} does not match supported version {SCHEMA_VERSION}")
    try:
        obj = objective_from_dict(d["objective"])
        P = DownClosedPolytope.from_dict(d["polytope"])
        alpha = d.get("alpha")
        return Instance(
            obj,
            P,
            d["generator"],
            d["seed"],
            d.get("params", {}),
            None if alpha is None else np.asarray(alpha, dtype=np.float64),
        )
    except KeyError as exc:
        raise SchemaError(f"instance file is missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"malformed instance file: {exc}") from exc


def load_instance(path):
    with open(path, encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    return instance_from_dict(d)
