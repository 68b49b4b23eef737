import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from drsubmax.constraints import DownClosedPolytope, tightest_upper_bound
from drsubmax.exceptions import InfeasiblePointError
from oracles import polytope_vertex_max


def random_polytope(rng, n, m):
    A = rng.uniform(0.01, 1.01, (m, n))
    return DownClosedPolytope(A, np.ones(m))


class TestTightestUpperBound:
    def test_hand_ratios(self):
        np.testing.assert_allclose(tightest_upper_bound([[1.0, 2.0], [2.0, 1.0]], [1.0, 1.0]), [0.5, 0.5])

    def test_identity(self):
        np.testing.assert_array_equal(tightest_upper_bound(np.eye(3), np.ones(3)), np.ones(3))

    def test_single_row(self):
        np.testing.assert_array_equal(tightest_upper_bound(np.ones((1, 4)), [1.0]), np.ones(4))

    def test_zero_entries_ignored(self):
        np.testing.assert_allclose(tightest_upper_bound([[2.0, 0.0], [0.0, 4.0]], [1.0, 1.0]), [0.5, 0.25])

    def test_negative_entry(self):
        with pytest.raises(ValueError):
            tightest_upper_bound([[1.0, -1.0]], [1.0])

    def test_unbounded_column(self):
        with pytest.raises(ValueError):
            tightest_upper_bound([[1.0, 0.0]], [1.0])


class TestContains:
    def test_origin(self):
        assert DownClosedPolytope([[1.0, 2.0]], [1.0]).contains(np.zeros(2))

    def test_box_corner(self):
        u = np.array([0.3, 2.0])
        assert DownClosedPolytope(np.eye(2), u).contains(u)

    def test_outside(self):
        u = np.array([0.3, 2.0])
        assert not DownClosedPolytope(np.eye(2), u).contains(u + 1e-6)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            DownClosedPolytope.box([1.0, 1.0]).contains(np.zeros(3))

    @given(st.integers(0, 10_000))
    @settings(max_examples=50, deadline=None)
    def test_down_closed(self, seed):
        rng = np.random.default_rng(seed)
        P = random_polytope(rng, 4, 3)
        x = P.sample(rng)
        y = x * rng.random(4)
        assert P.contains(x) and P.contains(y)


class TestShrink:
    def test_origin_is_identity(self):
        P = DownClosedPolytope([[1.0, 2.0]], [1.0])
        np.testing.assert_array_equal(P.shrink(np.zeros(2)).ubar, P.ubar)

    def test_full_shrink(self):
        P = DownClosedPolytope.box([1.0, 2.0])
        Q = P.shrink(P.ubar)
        np.testing.assert_array_equal(Q.ubar, 0.0)
        assert Q.lmo(np.ones(2)).tolist() == [0.0, 0.0]

    def test_hand_subtraction(self):
        Q = DownClosedPolytope.box([1.0, 1.0]).shrink(np.array([0.6, 0.0]))
        np.testing.assert_allclose(Q.ubar, [0.4, 1.0])

    def test_infeasible_point(self):
        with pytest.raises(InfeasiblePointError):
            DownClosedPolytope.box([1.0, 1.0]).shrink(np.array([2.0, 0.0]))


class TestLMO:
    def test_non_positive_direction(self):
        P = random_polytope(np.random.default_rng(0), 4, 3)
        np.testing.assert_array_equal(P.lmo(-np.ones(4)), 0.0)

    def test_box_sign_rule(self):
        v = DownClosedPolytope.box([2.0, 3.0, 1.0]).lmo(np.array([1.0, -1.0, 0.5]))
        np.testing.assert_array_equal(v, [2.0, 0.0, 1.0])

    def test_matches_vertex_enumeration(self):
        rng = np.random.default_rng(1)
        for _ in range(25):
            P = random_polytope(rng, 4, 3)
            d = rng.standard_normal(4)
            ref, _ = polytope_vertex_max(P, d)
            assert d @ P.lmo(d) == pytest.approx(ref, abs=1e-8)

    def test_output_feasible(self):
        rng = np.random.default_rng(2)
        for _ in range(25):
            P = random_polytope(rng, 5, 2)
            assert P.contains(P.lmo(rng.standard_normal(5)))


class TestShrunkenLMO:
    def test_zero_shift(self):
        rng = np.random.default_rng(3)
        P = random_polytope(rng, 4, 2)
        d = rng.standard_normal(4)
        np.testing.assert_allclose(P.shrunken_lmo(np.zeros(4), d), P.lmo(d))

    def test_saturated(self):
        P = DownClosedPolytope.box([1.0, 2.0])
        np.testing.assert_array_equal(P.shrunken_lmo(P.ubar, np.ones(2)), 0.0)

    def test_hand_example(self):
        v = DownClosedPolytope.box([1.0, 1.0]).shrunken_lmo(np.array([0.6, 0.0]), np.array([1.0, 1.0]))
        np.testing.assert_allclose(v, [0.4, 1.0])

    def test_sum_stays_below_ubar(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            P = random_polytope(rng, 4, 3)
            x = P.sample(rng)
            v = P.shrunken_lmo(x, rng.standard_normal(4))
            assert np.all(v <= P.ubar - x + 1e-9)


class TestProject:
    def test_fixed_point(self):
        rng = np.random.default_rng(5)
        P = random_polytope(rng, 3, 2)
        y = P.sample(rng)
        np.testing.assert_allclose(P.project(y), y, atol=1e-12)

    def test_box_clamp(self):
        np.testing.assert_array_equal(DownClosedPolytope.box([1.0, 1.0]).project(np.array([2.0, 2.0])), [1.0, 1.0])

    def test_halfspace(self):
        P = DownClosedPolytope([[1.0, 1.0]], [1.0])
        np.testing.assert_allclose(P.project(np.array([1.0, 1.0])), [0.5, 0.5], atol=1e-7)

    def test_idempotent_and_feasible(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            P = random_polytope(rng, 4, 3)
            x = P.project(rng.standard_normal(4) * 3)
            assert P.contains(x, 1e-6)
            np.testing.assert_allclose(P.project(x), x, atol=1e-6)

    def test_variational_inequality(self):
        # (y - x).(w - x) <= 0 for all w in P characterizes the projection
        rng = np.random.default_rng(7)
        P = random_polytope(rng, 3, 2)
        y = rng.standard_normal(3) * 2
        x = P.project(y, tol=1e-12, max_sweeps=100000)
        for w in P.sample(rng, 200):
            assert (y - x) @ (w - x) <= 1e-6


class TestDiameter:
    @pytest.mark.parametrize("ubar,expected", [([1.0, 1.0], np.sqrt(2)), ([0.0, 0.0], 0.0), ([3.0, 4.0], 5.0)])
    def test_values(self, ubar, expected):
        assert DownClosedPolytope.box(ubar).diameter_bound() == pytest.approx(expected)


class TestValidation:
    def test_negative_A(self):
        with pytest.raises(ValueError):
            DownClosedPolytope([[1.0, -0.5]], [1.0], [1.0, 1.0])

    def test_ubar_too_large(self):
        with pytest.raises(ValueError):
            DownClosedPolytope(np.eye(2), [1.0, 1.0], [2.0, 1.0])

    def test_round_trip(self):
        P = random_polytope(np.random.default_rng(8), 3, 2)
        Q = DownClosedPolytope.from_dict(P.to_dict())
        np.testing.assert_array_equal(P.A, Q.A)
        np.testing.assert_array_equal(P.ubar, Q.ubar)
