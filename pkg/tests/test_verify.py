import numpy as np
import pytest

from conftest import random_psd_kernel
from drsubmax.algorithms import nonmonotone_fw
from drsubmax.instances import brute_force_opt, gen_quadratic_uniform, gen_softmax
from drsubmax.objectives import Objective, QuadraticObjective, SoftmaxObjective
from drsubmax.verify import (
    ShiftedObjective,
    box_lower_bound,
    check_dr_hessian,
    check_growth_bound,
    check_key_claim,
    check_lemma1,
    check_lemma3,
    check_quadratic_lower_bound,
    check_weak_dr,
    quadratic_strong_dr_modulus,
)


class Quad(Objective):
    """``0.5 x^T H x + h^T x`` on ``[0, 1]^n`` with no sign checks."""

    def __init__(self, H, h=None):
        H = np.asarray(H, float)
        super().__init__(np.zeros(len(H)), np.ones(len(H)))
        self.H = H
        self.h = np.zeros(len(H)) if h is None else np.asarray(h, float)

    def value(self, x):
        return float(0.5 * x @ self.H @ x + self.h @ x)

    def grad(self, x):
        return self.H @ x + self.h


DR_QUAD = QuadraticObjective([[-1.0, -0.4, -0.1], [-0.4, -0.6, 0.0], [-0.1, 0.0, -0.3]], [1.0, 0.5, 0.2], upper=np.ones(3))
LINEAR = QuadraticObjective(np.zeros((3, 3)), [1.0, -0.5, 0.2], upper=np.ones(3))


class TestDRHessian:
    def test_dr_quadratic(self):
        assert check_dr_hessian(DR_QUAD).passed

    def test_planted_violation(self):
        rep = check_dr_hessian(Quad([[-1.0, 0.1], [0.1, -1.0]]))
        assert not rep.passed
        assert rep.max_excess == pytest.approx(0.1, abs=1e-6)
        assert rep.violations

    def test_softmax(self, rng):
        s = SoftmaxObjective(random_psd_kernel(rng, 4))
        assert check_dr_hessian(s, 50, 1e-6).passed


class TestWeakDR:
    def test_dr_quadratic(self):
        assert check_weak_dr(DR_QUAD).passed

    def test_convex_separable(self):
        assert not check_weak_dr(Quad(2 * np.eye(3))).passed

    def test_linear_equality(self):
        rep = check_weak_dr(LINEAR)
        assert rep.passed
        assert abs(rep.max_excess) <= 1e-12

    @pytest.mark.parametrize("seed", range(10))
    def test_agrees_with_hessian_check(self, seed):
        # for quadratics the sign of the worst Hessian entry decides both
        rng = np.random.default_rng(seed)
        H = rng.uniform(-1, 0.2, (3, 3))
        H = 0.5 * (H + H.T)
        q = Quad(H)
        expected = H.max() <= 0
        assert check_dr_hessian(q).passed == expected
        if not expected:
            i, j = np.unravel_index(np.argmax(H), H.shape)
            rep = check_weak_dr(q, samples=2000, seed=seed)
            assert not rep.passed or H[i, j] < 0.05


class TestLemma1:
    def test_dr_quadratic(self):
        assert check_lemma1(DR_QUAD, 0.0).passed

    def test_with_mu(self):
        mu = quadratic_strong_dr_modulus(DR_QUAD)
        assert mu == 0.3 == DR_QUAD.strong_dr_hint
        assert check_lemma1(DR_QUAD, mu).passed

    def test_modulus_is_tight(self):
        # any larger modulus breaks the inequality somewhere
        mu = quadratic_strong_dr_modulus(DR_QUAD)
        assert not check_lemma1(DR_QUAD, 1.5 * mu, samples=2000).passed

    def test_modulus_lower_bounds_sampled_curvature(self, rng):
        mu = quadratic_strong_dr_modulus(DR_QUAD)
        V = rng.random((500, 3))
        V /= np.linalg.norm(V, axis=1, keepdims=True)
        assert np.all(-np.einsum("ij,jk,ik->i", V, DR_QUAD.H, V) >= mu - 1e-12)

    def test_coincident_points(self):
        x = np.array([0.2, 0.4, 0.1])
        lhs = (x - x) @ DR_QUAD.grad(x)
        rhs = 2 * DR_QUAD.value(x) - 2 * DR_QUAD.value(x)
        assert lhs == rhs == 0.0

    def test_comparable_pair_is_concavity(self, rng):
        # y >= x collapses the inequality to concavity along y - x
        for _ in range(20):
            x = rng.random(3) * 0.5
            y = x + rng.random(3) * 0.5
            assert (y - x) @ DR_QUAD.grad(x) >= DR_QUAD.value(y) - DR_QUAD.value(x) - 1e-12


def desk(seed):
    return gen_quadratic_uniform(4, 2, seed)


class TestKeyClaim:
    @pytest.mark.parametrize("seed", range(3))
    def test_desk(self, seed):
        inst = desk(seed)
        xstar = brute_force_opt(inst.objective, inst.polytope, 11, 10, seed).x
        rep = check_key_claim(inst.objective, inst.polytope, xstar, 100, seed)
        assert rep.passed and rep.hypothesis_ok and rep.checks == 100

    def test_negative_values_flag_hypothesis(self):
        q = QuadraticObjective(-np.eye(2), [0.0, 0.0], -1.0, upper=np.ones(2))
        from drsubmax.constraints import DownClosedPolytope

        rep = check_key_claim(q, DownClosedPolytope.box([1.0, 1.0]), np.zeros(2), 10)
        assert not rep.hypothesis_ok

    def test_origin_case(self):
        inst = desk(0)
        f = inst.objective
        xstar = brute_force_opt(f, inst.polytope, 11, 5, 0).x
        x = np.zeros(4)
        total = f.value(xstar) + f.value(x) + f.value(np.maximum(x, xstar)) + f.value(np.minimum(x, xstar))
        assert total >= f.value(xstar)


class TestLemma3:
    def test_vacuous(self):
        inst = desk(0)
        u = inst.polytope.ubar
        rep = check_lemma3(inst.objective, u, u * 0.5, ubar=u)
        assert rep.passed

    @pytest.mark.parametrize("seed", range(3))
    def test_desk(self, seed):
        inst = desk(seed)
        u = inst.polytope.ubar
        xstar = brute_force_opt(inst.objective, inst.polytope, 11, 10, seed).x
        rep = check_lemma3(inst.objective, u / 2, xstar, 200, seed, ubar=u)
        assert rep.passed and rep.hypothesis_ok

    def test_bad_theta(self):
        with pytest.raises(ValueError):
            check_lemma3(DR_QUAD, np.full(3, 2.0), np.zeros(3))


class TestGrowth:
    def test_zero_and_full_step(self):
        inst = desk(1)
        _, tr = nonmonotone_fw(inst.objective, inst.polytope, 1.0)
        rep = check_growth_bound(tr, inst.polytope.ubar, 1.0)
        assert rep.passed and rep.checks == 2

    def test_desk(self):
        inst = desk(2)
        _, tr = nonmonotone_fw(inst.objective, inst.polytope, 0.1)
        assert check_growth_bound(tr, inst.polytope.ubar, 0.1).passed

    def test_detects_fast_growth(self):
        inst = desk(2)
        _, tr = nonmonotone_fw(inst.objective, inst.polytope, 0.1)
        tr.x[1] = inst.polytope.ubar.copy()
        assert not check_growth_bound(tr, inst.polytope.ubar, 0.1).passed


class TestQuadraticLowerBound:
    def test_zero_direction_equality(self):
        x = np.array([0.3, 0.2, 0.6])
        assert DR_QUAD.value(x + 0) == DR_QUAD.value(x) + DR_QUAD.grad(x) @ np.zeros(3)

    def test_linear(self):
        rep = check_quadratic_lower_bound(LINEAR, 0.0)
        assert rep.passed and abs(rep.max_excess) <= 1e-12

    @pytest.mark.parametrize("seed", range(3))
    def test_certified_L(self, seed):
        inst = desk(seed)
        q = inst.objective
        assert check_quadratic_lower_bound(q, q.lipschitz_hint, 200, seed, upper=inst.polytope.ubar).passed

    def test_too_small_L_fails(self):
        q = Quad(np.array([[-5.0, 0.0], [0.0, 1.0]]))
        assert not check_quadratic_lower_bound(q, 0.0, 200).passed


class TestShift:
    def test_quadratic_bound_is_certified(self, rng):
        inst = desk(4)
        lb = box_lower_bound(inst.objective, inst.polytope.ubar)
        X = rng.random((1000, 4)) * inst.polytope.ubar
        assert np.all(inst.objective.value_batch(X) >= lb - 1e-12)

    def test_softmax_bound_is_certified(self, rng):
        inst = gen_softmax(4, 3, 0)
        u = inst.polytope.ubar
        lb = box_lower_bound(inst.objective, u)
        X = rng.random((500, 4)) * u
        assert np.all(inst.objective.value_batch(X) >= lb - 1e-12)
        shifted = ShiftedObjective(inst.objective, -lb)
        assert min(shifted.value(x) for x in X) >= -1e-12

    def test_unknown(self):
        assert box_lower_bound(Quad(-np.eye(2)), np.ones(2)) is None
