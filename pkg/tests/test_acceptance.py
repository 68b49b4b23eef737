"""Acceptance suite: one test per criterion, each logging a PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from acceptance_log import record
from conftest import random_psd_kernel, rel_error
from drsubmax.algorithms import nonmonotone_fw, two_phase_fw
from drsubmax.cli import main
from drsubmax.conic import flip_reduce, infer_sign_vector, verify_kalpha
from drsubmax.exceptions import LPInfeasibleError
from drsubmax.instances import brute_force_opt, gen_quadratic_exponential, gen_quadratic_uniform, gen_softmax
from drsubmax.lp import LinearProgram, maximize_linear
from drsubmax.numerics import finite_diff_gradient
from drsubmax.objectives import LogisticObjective, MeanFieldObjective, Objective, QuadraticObjective, SoftmaxObjective
from drsubmax.verify import check_dr_hessian, check_growth_bound, check_key_claim, check_quadratic_lower_bound
from oracles import lp_vertex_enumeration

SEEDS = range(20)


@pytest.fixture(scope="module")
def desk_runs():
    """The 40 criterion-1 instances with oracle values and nonmonotone-fw runs."""
    t0 = time.perf_counter()
    runs = []
    for label, gen, m in (("quad-uniform", gen_quadratic_uniform, 2), ("quad-exp", gen_quadratic_exponential, 5)):
        for seed in SEEDS:
            inst = gen(5, m, seed)
            oracle = brute_force_opt(inst.objective, inst.polytope, 21, 20, seed)
            x, trace = nonmonotone_fw(inst.objective, inst.polytope, 0.01)
            runs.append({"label": f"{label}:{seed}", "inst": inst, "oracle": oracle, "x": x, "trace": trace})
    return runs, time.perf_counter() - t0


def test_c01_one_over_e_floor(desk_runs):
    runs, elapsed = desk_runs
    ratios = [r["inst"].objective.value(r["x"]) / r["oracle"].value for r in runs]
    worst = min(ratios)
    ok = len(runs) == 40 and worst >= 1 / math.e and all(r["oracle"].value > 0 for r in runs) and elapsed < 120
    record(1, "1/e floor", ok, f"min value/oracle {worst:.4f} over {len(runs)} instances, {elapsed:.1f}s")
    assert ok


def test_c02_local_global(desk_runs):
    runs, _ = desk_runs
    margins = []
    for r in runs:
        res = two_phase_fw(r["inst"].objective, r["inst"].polytope)
        margins.append(res.value - 0.25 * (r["oracle"].value - res.g_P - res.g_Q) + 1e-8)
    ok = min(margins) >= 0
    record(2, "local-global inequality", ok, f"min margin {min(margins):.4g}, {sum(m < 0 for m in margins)} failures")
    assert ok


def test_c03_growth_bound(desk_runs):
    runs, _ = desk_runs
    violations, worst = 0, -np.inf
    for r in runs:
        rep = check_growth_bound(r["trace"], r["inst"].polytope.ubar, 0.01, tol=1e-9)
        violations += len(rep.violations)
        worst = max(worst, rep.max_excess)
    ok = violations == 0
    record(3, "growth bound", ok, f"{violations} violations, max excess {worst:.3g}")
    assert ok


def test_c04_step_ledger(desk_runs):
    runs, _ = desk_runs
    bad_sum, bad_feas = 0, 0
    for r in runs:
        P, tr = r["inst"].polytope, r["trace"]
        bad_sum += sum(tr.gamma) != 1.0 or tr.t[-1] != 1.0
        bad_feas += bool(np.any(P.A @ r["x"] > P.b + 1e-9))
    ok = bad_sum == 0 and bad_feas == 0
    record(4, "step-size ledger", ok, f"{bad_sum} runs with sum(gamma) != 1, {bad_feas} infeasible outputs")
    assert ok




def _gradient_objectives():
    rng = np.random.default_rng(2024)
    H = -rng.random((5, 5))
    yield "quadratic", QuadraticObjective(0.5 * (H + H.T), rng.random(5), 0.3, upper=np.ones(5))
    yield "softmax", SoftmaxObjective(random_psd_kernel(rng, 5))
    for n in (2, 3, 4):
        yield f"meanfield n={n}", MeanFieldObjective(rng.standard_normal(1 << n))
    Z = rng.random((40, 4)) * np.array([1.0, -1.0, 1.0, -1.0])
    y = rng.choice([-1.0, 1.0], 40)
    yield "logistic rational", LogisticObjective(Z, y, 0.1, "rational", 1.0)
    yield "logistic capped", LogisticObjective(Z, y, 0.1, "capped", 0.5)


def test_c05_gradient_correctness():
    rng = np.random.default_rng(5)
    worst = {}
    for name, obj in _gradient_objectives():
        lo, hi = obj.lower, obj.upper
        errs = []
        for _ in range(50):
            x = lo + (0.02 + 0.96 * rng.random(obj.n)) * (hi - lo)
            errs.append(rel_error(obj.grad(x), finite_diff_gradient(obj.value, x)))
        worst[name] = max(errs)
    ok = all(e <= 1e-5 for e in worst.values())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    record(5, "gradient correctness", ok, f"max rel error (50 samples each): {detail}")
    assert ok


class _Planted(Objective):
    def __init__(self, H):
        super().__init__(np.zeros(len(H)), np.ones(len(H)))
        self.H = np.asarray(H, float)

    def value(self, x):
        return float(0.5 * x @ self.H @ x)

    def grad(self, x):
        return self.H @ x


def test_c06_dr_certification():
    results = []
    for seed in range(5):
        for gen, m in ((gen_quadratic_uniform, 3), (gen_quadratic_exponential, 6), (gen_softmax, 4)):
            inst = gen(6, m, seed)
            rep = check_dr_hessian(inst.objective, samples=50, tol=1e-6, seed=seed, upper=inst.polytope.ubar)
            results.append(rep.passed)
    H = -np.ones((4, 4))
    H[1, 2] = H[2, 1] = 0.3
    planted = check_dr_hessian(_Planted(H), samples=50, tol=1e-6)
    ok = all(results) and not planted.passed
    record(6, "DR certification", ok, f"{sum(results)}/{len(results)} generated pass, planted excess {planted.max_excess:.3g}")
    assert ok


def test_c07_key_claim(desk_runs):
    runs, _ = desk_runs
    chosen = runs[:5] + runs[20:25]
    passed = 0
    for r in chosen:
        rep = check_key_claim(r["inst"].objective, r["inst"].polytope, r["oracle"].x, trials=100, seed=7)
        passed += rep.passed and rep.hypothesis_ok and rep.checks == 100 and not rep.violations
    ok = passed == 10
    record(7, "key claim", ok, f"{passed}/10 instances pass 100/100 trials")
    assert ok


def _random_lp(rng):
    n = int(rng.integers(1, 6))
    m = int(rng.integers(1, 6))
    if rng.random() < 0.5:
        G = rng.uniform(0.01, 1.01, (m, n))
        g = rng.uniform(0.5, 2.0, m)
        lo = np.zeros(n)
        hi = np.full(n, np.inf) if rng.random() < 0.5 else rng.uniform(0.1, 3.0, n)
    else:
        G = rng.standard_normal((m, n))
        lo = rng.uniform(-2.0, 0.5, n)
        hi = lo + rng.uniform(0.1, 3.0, n)
        x0 = lo + rng.random(n) * (hi - lo)
        g = G @ x0 + rng.uniform(0.0, 1.0, m)
    return rng.standard_normal(n), G, g, lo, hi


def test_c08_lp_oracle():
    rng = np.random.default_rng(8)
    worst, mismatches = 0.0, 0
    for _ in range(200):
        c, G, g, lo, hi = _random_lp(rng)
        ref, _ = lp_vertex_enumeration(c, G, g, lo, hi)
        try:
            _, val = maximize_linear(LinearProgram(c, G, g, lo, hi))
        except LPInfeasibleError:
            val = None
        if ref is None or val is None:
            mismatches += (ref is None) != (val is None)
            continue
        err = abs(val - ref)
        worst = max(worst, err)
        mismatches += err > 1e-8
    ok = mismatches == 0
    record(8, "LP oracle equivalence", ok, f"{mismatches}/200 mismatches, max |diff| {worst:.2e}")
    assert ok


def test_c09_conic_reduction():
    max_gap, offdiag = 0.0, 0
    for seed, reg in ((0, "rational"), (1, "capped"), (2, "rational")):
        rng = np.random.default_rng(seed)
        signs = rng.choice([-1.0, 1.0], 5)
        Z = rng.random((60, 5)) * signs
        lo = LogisticObjective(Z, rng.choice([-1.0, 1.0], 60), 0.1, reg)
        alpha = infer_sign_vector(lo.data)
        g = -lo
        f, _ = flip_reduce(g, alpha)
        for x in rng.random((100, 5)):
            max_gap = max(max_gap, abs(f.value(x) - g.value(alpha * x)))
        offdiag += verify_kalpha(g, alpha, samples=50, seed=seed).offdiag_violations
    ok = max_gap <= 1e-12 and offdiag == 0
    record(9, "conic reduction", ok, f"max |f(x) - g(alpha x)| {max_gap:.1e}, {offdiag} off-diagonal violations")
    assert ok


def test_c10_quadratic_lower_bound(desk_runs):
    runs, _ = desk_runs
    failed, checks = 0, 0
    for i, r in enumerate(runs):
        q = r["inst"].objective
        rep = check_quadratic_lower_bound(q, q.lipschitz_hint, 200, seed=i, upper=r["inst"].polytope.ubar)
        failed += not rep.passed
        checks += rep.checks
    ok = failed == 0 and checks == 200 * len(runs)
    record(10, "quadratic lower bound", ok, f"{failed}/{len(runs)} instances fail, {checks} pairs checked")
    assert ok


def test_c11_reproducibility(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    codes = [main(["experiment", "--seed", "11", "--out", str(p)]) for p in (a, b)]
    ok = codes == [0, 0] and a.read_bytes() == b.read_bytes()
    record(11, "reproducibility", ok, f"default experiment twice, {a.stat().st_size} bytes, identical={a.read_bytes() == b.read_bytes()}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
