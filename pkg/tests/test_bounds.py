import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from polyrad.bounds import (
    INEQUALITY_A_THRESHOLD,
    composition_bound,
    depth_dependent_bound,
    depth_independent_bound,
    depth_independent_crossover,
    gamma_of_net,
    logbar,
    min_ratio_bound,
    perturbation_bound,
    prior_bound_exponential,
    prior_bound_spectral,
    r_dependent_bound,
)
from polyrad.norms import row_norms
from polyrad.polynet import ClassSpec, PolyNet, sample_feasible_net

import reference

INF = math.inf
pos = st.floats(1e-3, 1e3)


class TestScalars:
    def test_threshold_root(self):
        assert INEQUALITY_A_THRESHOLD == pytest.approx(reference.EXPM1_EQ_2Z_ROOT, rel=1e-14)
        z = INEQUALITY_A_THRESHOLD
        assert math.expm1(z) == pytest.approx(2 * z, rel=1e-13)

    def test_logbar(self):
        assert logbar(1) == 1
        assert logbar(math.e**2) == pytest.approx(2.0, rel=1e-15)
        assert logbar(0.5) == 1
        with pytest.raises(ValueError):
            logbar(0)

    def test_min_ratio(self):
        assert min_ratio_bound(4, 1, 2) == 2.0
        assert min_ratio_bound(3, 3, 4) == 1.0
        assert min_ratio_bound(10, 2, 5) == pytest.approx(reference.FIFTH_ROOT_5, rel=1e-14)
        with pytest.raises(ValueError):
            min_ratio_bound(1, 2, 1)

    @given(pos, pos, st.integers(1, 30))
    def test_min_ratio_nonincreasing(self, a, b, r):
        M, G = max(a, b), min(a, b)
        assert min_ratio_bound(M, G, r + 1) <= min_ratio_bound(M, G, r)
        assert (min_ratio_bound(M, G, r) == 1.0) == (M == G)

    def test_composition(self):
        assert composition_bound(1, 1, 100, 0).value == pytest.approx(0.1, rel=1e-15)
        assert composition_bound(1, 0, 100, 0).value == 0
        a, b = composition_bound(1, 2, 50, 0.3), composition_bound(2, 2, 50, 0.3)
        assert b.value == 2 * a.value

    def test_priors(self):
        assert prior_bound_exponential(1, [1, 1, 1], 3, 4) == 4.0
        assert prior_bound_exponential(2.0, [], 0, 16) == 0.5
        assert prior_bound_exponential(1, [1], 1, 64) == prior_bound_exponential(1, [1], 1, 16) / 2
        assert prior_bound_spectral(1, [1, 1, 1, 1], 4, 64) == 1.0
        assert prior_bound_spectral(1, [3.0], 2, 8) == 3 * prior_bound_spectral(1, [1.0], 2, 8)

    def test_spectral_flat_under_cube_root_depth(self):
        vals = [prior_bound_spectral(1.0, [1.0], m ** (1 / 3), m) for m in (8, 64, 1000, 10**6)]
        np.testing.assert_allclose(vals, 1.0, rtol=1e-12)


class TestDepthDependent:
    def test_hand_value(self):
        rep = depth_dependent_bound([1.0], [[0.6, 0.8]], 2)
        assert rep.value == pytest.approx(reference.SQRT_2LN2_PLUS_1, rel=1e-14)
        assert rep.constant_c == 1.0

    def test_linear_in_budget_product(self, rng):
        X = rng.standard_normal((5, 3))
        a = depth_dependent_bound([0.5, 2.0], X, 2).value
        b = depth_dependent_bound([1.5, 2.0], X, 2).value
        assert b == pytest.approx(3 * a, rel=1e-14)

    def test_zero_inputs(self):
        assert depth_dependent_bound([1, 2], np.zeros((4, 3)), 1.5).value == 0

    def test_inf_branch_uses_max(self):
        X = np.array([[1.0, -3.0], [2.0, 0.5]])
        rep = depth_dependent_bound([1.0], X, INF)
        assert rep.details["lp_of_norms"] == 3.0

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            depth_dependent_bound([1.0], np.zeros((0, 2)), 2)

    @given(st.integers(1, 6), st.sampled_from([1, 1.5, 2, 3, INF]), st.integers(0, 10**6), st.floats(1.0, 3.0))
    def test_monotone(self, d, p, seed, scale):
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((6, 3))
        budgets = list(rng.uniform(0.1, 2, size=d))
        base = depth_dependent_bound(budgets, X, p).value
        assert depth_dependent_bound(budgets, X, p, d=d + 1).value >= base
        assert depth_dependent_bound([budgets[0] * scale] + budgets[1:], X, p).value >= base * (1 - 1e-14)
        X2 = X.copy()
        X2[0] *= scale
        assert depth_dependent_bound(budgets, X2, p).value >= base * (1 - 1e-14)


class TestDepthIndependent:
    def test_hand_value(self):
        rep = depth_independent_bound(1, 2, 1, 1, 16, 8, 1)
        assert rep.details["branch"] == "sqrt_d_over_m"
        assert rep.value == pytest.approx(2 * math.sqrt(0.5), rel=1e-14)
        assert rep.details["depth_free_term"] == pytest.approx(2 * reference.LN16_POW_075_HALF, rel=1e-14)

    def test_saturates_in_depth(self):
        vals = [depth_independent_bound(1, 2, 1, 1, 16, d).value for d in (100, 1000, 10**6)]
        assert vals[0] == vals[1] == vals[2]

    def test_quadrupled_m_halves_sqrt_branch(self):
        a = depth_independent_bound(1, 2, 1, 1, 10**4, 1)
        b = depth_independent_bound(1, 2, 1, 1, 4 * 10**4, 1)
        assert a.details["branch"] == b.details["branch"] == "sqrt_d_over_m"
        assert b.value == pytest.approx(a.value / 2, rel=1e-14)

    def test_errors_and_flags(self):
        with pytest.raises(ValueError):
            depth_independent_bound(1, 1, 2, 1, 16, 2)
        with pytest.raises(ValueError):
            depth_independent_bound(1, 2, 1, 1, 1, 2)
        assert not depth_independent_bound(1, 2, 0.5, 1, 16, 2).flags["gamma_at_least_one"]

    @given(pos, pos, pos, st.floats(0.1, 10), st.integers(2, 10**6), st.integers(1, 500))
    def test_never_exceeds_sqrt_branch(self, B, a, b, gl, m, d):
        M, G = max(a, b), min(a, b)
        rep = depth_independent_bound(B, M, G, gl, m, d)
        assert rep.value <= B * M / gl * math.sqrt(d / m) * (1 + 1e-14)
        assert rep.value == min(rep.details["depth_free_term"], rep.details["sqrt_d_over_m_term"])

    def test_crossover_solves_branch_equality(self):
        dstar = depth_independent_crossover(8.0, 1.0, 16)
        rep = depth_independent_bound(1, 8.0, 1.0, 1, 16, dstar)
        assert rep.details["depth_free_term"] == pytest.approx(rep.details["sqrt_d_over_m_term"], rel=1e-12)


class TestPerturbation:
    def test_log_mode_value(self):
        rep = perturbation_bound(1, 2, 2, 2, 1, 2, "paper")
        assert rep.value == pytest.approx(reference.TWO_SQRT_2LN2, rel=1e-14)

    @pytest.mark.parametrize("p", [1, 2, 3, INF])
    def test_equal_products_give_zero(self, p):
        for mode in ("paper", "exact"):
            assert perturbation_bound(1, 3, p, 5, 5, 2, mode).value == 0

    def test_exact_below_log_mode_at_half(self):
        # z = (p/r) ln(M/G) = 0.5
        M = math.exp(0.5)
        ex = perturbation_bound(1, 1, 2, M, 1, 2, "exact")
        pa = perturbation_bound(1, 1, 2, M, 1, 2, "paper")
        assert ex.details["z"] == pytest.approx(0.5)
        assert ex.flags["inequality_a_domain"]
        assert math.expm1(0.5) <= 1.0 and ex.value <= pa.value

    def test_errors(self):
        with pytest.raises(ValueError):
            perturbation_bound(1, 1, 2, 1, 2, 1)
        with pytest.raises(ValueError):
            perturbation_bound(1, 1, 2, 2, 1, 0)
        with pytest.raises(ValueError):
            perturbation_bound(1, 1, 2, 2, 1, 1, "other")

    @given(pos, pos, st.sampled_from([1, 1.5, 2, 3, 7]), st.floats(1.0, 50.0), st.integers(1, 8))
    def test_flag_decides_ordering(self, B, prod, p, ratio, r):
        ex = perturbation_bound(B, prod, p, ratio, 1.0, r, "exact")
        pa = perturbation_bound(B, prod, p, ratio, 1.0, r, "paper")
        z = ex.details["z"]
        assume(abs(z - INEQUALITY_A_THRESHOLD) > 1e-9)
        if ex.flags["inequality_a_domain"]:
            assert ex.value <= pa.value * (1 + 1e-12)
        elif z > 0:
            assert ex.value > pa.value


class TestRDependent:
    def test_hand_value_d1(self):
        rep = r_dependent_bound(2.0, [3.0], 3.0, 0.5, math.e, [0.0], 2, c=1.5)
        assert rep.value == pytest.approx(1.5 * 2 * 3 / 0.5 * reference.INV_SQRT_E, rel=1e-14)
        assert rep.details["best_r"] == 1

    def test_equal_rads_pick_r1_when_m_equals_gamma(self):
        rep = r_dependent_bound(1.0, [1.0, 1.0, 1.0], 1.0, 1.0, 50, [0.1] * 3, 2)
        assert rep.details["best_r"] == 1
        vals = [row["value"] for row in rep.details["table"]]
        assert vals == sorted(vals)

    def test_gamma_loss_halves(self):
        a = r_dependent_bound(1.0, [0.5, 2.0], 0.5, 1.0, 50, [0.1, 0.2], 2)
        b = r_dependent_bound(1.0, [0.5, 2.0], 0.5, 2.0, 50, [0.1, 0.2], 2)
        assert b.value == pytest.approx(a.value / 2, rel=1e-14)

    def test_table_length_checked(self):
        with pytest.raises(ValueError):
            r_dependent_bound(1.0, [1.0, 1.0], 1.0, 1.0, 10, [0.1], 2)

    def test_inf_exponent_limit(self):
        rep = r_dependent_bound(1.0, [2.0, 2.0], 1.0, 1.0, 10, [0.0, 0.0], INF)
        assert all(row["ratio_term"] == 1.0 for row in rep.details["table"])


class TestGammaOfNet:
    def test_examples(self):
        assert gamma_of_net(PolyNet((np.eye(2), np.eye(2)), 2), 2) == 1.0
        assert gamma_of_net(PolyNet((np.array([[3.0, 0], [0, 4.0]]),), 2), 2) == 4.0

    def test_random_against_row_max(self, rng):
        spec = ClassSpec.canonical((3, 4, 2, 1), 3, 1.5, 3, 1.0)
        net = sample_feasible_net(spec, 0.8, rng)
        ref = 1.0
        for W in net.weights:
            ref *= max(reference.lp(list(row), 1.5) for row in W)
        assert gamma_of_net(net, 1.5) == pytest.approx(ref, rel=1e-12)

    @given(st.integers(0, 10**6))
    def test_min_ratio_lemma_on_sampled_nets(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(1, 6))
        dims = tuple(int(v) for v in rng.integers(1, 6, size=d + 1))
        spec = ClassSpec.canonical(dims, 2, 2, 2, 1.0)
        net = sample_feasible_net(spec, float(rng.uniform(0.2, 1)), rng)
        full = net.layer_norms(2, 2)
        top = np.array([row_norms(W, 2).max() for W in net.weights])
        G = gamma_of_net(net, 2)
        for r in range(1, d + 1):
            assert (full / top)[:r].min() <= min_ratio_bound(float(np.prod(full)), G, r) * (1 + 1e-12)


class TestGammaTolerance:
    def test_ulp_excess_is_clamped(self):
        M = 0.38503407689561536
        G = math.nextafter(M, 1.0)
        assert min_ratio_bound(M, G, 2) == 1.0
        assert perturbation_bound(1, 1, 2, M, G, 1, "exact").value == 0
        assert depth_independent_bound(1, M, G, 1, 16, 2).value >= 0

    def test_real_excess_raises(self):
        with pytest.raises(ValueError):
            min_ratio_bound(1.0, 1.0 + 1e-9, 1)
        with pytest.raises(ValueError):
            perturbation_bound(1, 1, 2, 1.0, 1.0 + 1e-9, 1)
