import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyrad.norms import vector_norm
from polyrad.polynet import (
    ClassSpec,
    PolyNet,
    check_feasibility,
    constraint_threshold,
    forward,
    forward_prefix,
    forward_suffix,
    forward_trace,
    ipow,
    propagate_norm_bound,
    sample_feasible_net,
    sample_inputs,
)

import reference

INF = math.inf
PAIRS = [(2, 2), (1, INF), (INF, 1), (3, 1.5), (1.5, 3)]


def one_by_one(*values, k=2):
    return PolyNet(tuple(np.array([[v]]) for v in values), k)


@st.composite
def canonical_specs(draw, max_depth=4, max_width=4):
    d = draw(st.integers(1, max_depth))
    dims = tuple(draw(st.lists(st.integers(1, max_width), min_size=d + 1, max_size=d + 1)))
    k = draw(st.integers(2, 4))
    q, p = draw(st.sampled_from(PAIRS))
    B = draw(st.floats(0.1, 5.0))
    return ClassSpec.canonical(dims, k, q, p, B)


class TestPolyNet:
    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            PolyNet((np.ones((2, 3)), np.ones((1, 3))), 2)

    @pytest.mark.parametrize("k", [1, 0, 2.5])
    def test_bad_degree_rejected(self, k):
        with pytest.raises(ValueError):
            PolyNet((np.ones((1, 1)),), k)

    def test_weights_are_read_only(self):
        net = one_by_one(0.5, 2.0)
        with pytest.raises(ValueError):
            net.weights[0][0, 0] = 1.0

    def test_replace_layer_is_one_based(self):
        net = one_by_one(0.5, 2.0)
        alt = net.replace_layer(2, np.array([[3.0]]))
        assert alt.weights[1][0, 0] == 3.0 and net.weights[1][0, 0] == 2.0
        with pytest.raises(IndexError):
            net.replace_layer(0, np.array([[1.0]]))

    @given(st.integers(-5, 5), st.integers(1, 9))
    def test_ipow_is_exact_integer_power(self, base, k):
        assert ipow(np.array([float(base)]), k)[0] == float(base) ** k


class TestForward:
    def test_hand_trace(self):
        assert forward(one_by_one(0.5, 2.0), [1.0])[0] == 0.5

    def test_single_layer_identity(self, rng):
        x = rng.standard_normal(4)
        assert np.array_equal(forward(PolyNet((np.eye(4),), 3), x), x)

    def test_matches_loop_evaluator(self, rng):
        weights = tuple(rng.standard_normal((2, 2)) for _ in range(3))
        x = rng.standard_normal(2)
        ref = reference.polynet_forward([W.tolist() for W in weights], x.tolist(), 3)
        np.testing.assert_allclose(forward(PolyNet(weights, 3), x), ref, rtol=1e-12)

    def test_batch_matches_single(self, rng):
        net = PolyNet((rng.standard_normal((3, 2)), rng.standard_normal((1, 3))), 2)
        X = rng.standard_normal((5, 2))
        batch = forward(net, X)
        for x, y in zip(X, batch):
            np.testing.assert_allclose(forward(net, x), y, rtol=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            forward(one_by_one(1.0), [1.0, 2.0])

    def test_prefix_examples(self):
        assert forward_prefix(one_by_one(0.5, 2.0), 1, [1.0])[0] == 0.25
        assert forward_prefix(PolyNet((np.eye(1),), 2), 1, [2.0])[0] == 4.0
        with pytest.raises(IndexError):
            forward_prefix(one_by_one(1.0), 2, [1.0])

    @given(canonical_specs(), st.integers(0, 2**31 - 1))
    def test_suffix_after_prefix_reproduces_forward(self, spec, seed):
        net = sample_feasible_net(spec, 1.0, seed)
        X = sample_inputs(7, spec.dims[0], spec.p, spec.B, seed)
        full = forward(net, X)
        for r in range(0, net.depth):
            h = X if r == 0 else forward_prefix(net, r, X)
            np.testing.assert_allclose(forward_suffix(net, r, h), full, rtol=1e-13, atol=1e-300)

    def test_trace_last_layer_is_linear(self, rng):
        net = PolyNet((rng.standard_normal((2, 3)), rng.standard_normal((2, 2))), 3)
        pre, post = forward_trace(net, rng.standard_normal((4, 3)))
        np.testing.assert_allclose(post[0], pre[0] ** 3, rtol=1e-15)
        np.testing.assert_array_equal(post[1], pre[1])

    @given(st.floats(0.1, 10.0))
    def test_first_layer_rescaling_invariance(self, c):
        rng = np.random.default_rng(1)
        W1, W2 = rng.standard_normal((3, 2)), rng.standard_normal((1, 3))
        x = rng.standard_normal(2)
        a = forward_trace(PolyNet((W1, W2), 2), x[None])[0][0]
        b = forward_trace(PolyNet((W1 * c, W2), 2), (x / c)[None])[0][0]
        np.testing.assert_allclose(a, b, rtol=1e-12)


class TestConstraints:
    def test_threshold_values(self):
        assert constraint_threshold(2) == 0.5
        assert constraint_threshold(3) == pytest.approx(reference.THRESHOLD_K3, rel=1e-15)
        assert constraint_threshold(64) == pytest.approx(reference.THRESHOLD_K64, rel=1e-14)
        assert 0.93 < constraint_threshold(64) < 1
        assert constraint_threshold(32) < constraint_threshold(64)
        with pytest.raises(ValueError):
            constraint_threshold(1)

    def test_propagate_examples(self):
        assert propagate_norm_bound([0.5], 1.0, k=2)[1] == 0.5
        assert propagate_norm_bound([0.5, 2.0], 1.0, k=2)[1:].tolist() == [0.25, 0.5]
        assert propagate_norm_bound([0.7, 1.3, 2.0], 0.0, k=3)[1:3].tolist() == [0.0, 0.0]

    def test_feasibility_examples(self):
        ok = check_feasibility(one_by_one(0.5, 2.0), 1.0, 2, 2)
        assert ok.passed and [c.product for c in ok.layers] == [0.5, 0.5]
        bad = check_feasibility(one_by_one(0.6, 1.0), 1.0, 2, 2)
        assert not bad.passed and not bad.layers[0].passed
        zero = check_feasibility(PolyNet((np.zeros((2, 2)), np.zeros((1, 2))), 2), 1.0, 2, 2)
        assert zero.passed

    def test_report_flags_canonical_conditions(self):
        rep = check_feasibility(one_by_one(0.5, 2.5), 1.0, 2, 2)
        assert rep.canonical_first and not rep.canonical_rest

    def test_classspec_validation(self):
        with pytest.raises(ValueError):
            ClassSpec((2, 1), 2, 2, 3, 1.0, (1.0,))
        with pytest.raises(ValueError):
            ClassSpec((2, 1), 2, 2, 2, 1.0, (1.0,), gamma=2.0)
        spec = ClassSpec.canonical((2, 3, 1), 3, 1, INF, 2.0)
        assert spec.budgets == (0.25, 4.0) and spec.is_canonical
        assert not spec.with_budgets((0.3, 4.0)).is_canonical


class TestSampling:
    @given(canonical_specs(), st.integers(0, 2**31 - 1), st.floats(0.05, 1.0))
    def test_feasible_net_hits_target_norms(self, spec, seed, frac):
        net = sample_feasible_net(spec, frac, seed)
        np.testing.assert_allclose(net.layer_norms(spec.q, spec.p), frac * np.array(spec.budgets), rtol=1e-12)
        assert check_feasibility(net, spec.B, spec.q, spec.p).passed

    def test_same_seed_same_net(self):
        spec = ClassSpec.canonical((3, 4, 1), 2, 2, 2, 1.0)
        assert sample_feasible_net(spec, 1.0, 7) == sample_feasible_net(spec, 1.0, 7)

    def test_noncanonical_rejected(self):
        spec = ClassSpec((2, 1), 2, 2, 2, 1.0, (1.0,))
        with pytest.raises(ValueError):
            sample_feasible_net(spec, 1.0, 0)

    @given(st.sampled_from([1, 1.5, 2, 3, INF]), st.integers(1, 6), st.floats(0.0, 10.0), st.integers(0, 1000))
    def test_inputs_stay_in_ball(self, p, n, B, seed):
        X = sample_inputs(50, n, p, B, seed, boundary_prob=0.5)
        assert np.all(vector_norm(X, p) <= B)

    def test_zero_radius(self):
        assert not np.any(sample_inputs(5, 3, 2, 0.0, 0))

    def test_radius_law(self):
        n, B = 3, 1.0
        r = vector_norm(sample_inputs(10_000, n, 1, B, 42), 1)
        assert r.max() <= B
        se = r.std(ddof=1) / math.sqrt(r.size)
        assert abs(r.mean() - B * n / (n + 1)) <= 3 * se

    def test_boundary_fraction(self):
        r = vector_norm(sample_inputs(4000, 4, 2, 2.0, 3, boundary_prob=0.5), 2)
        assert np.mean(np.isclose(r, 2.0, rtol=1e-12)) == pytest.approx(0.5, abs=0.05)


class TestLipschitzCertificate:
    @given(canonical_specs(max_depth=5), st.integers(0, 2**31 - 1))
    def test_slopes_and_radii(self, spec, seed):
        net = sample_feasible_net(spec, 1.0, seed)
        X = sample_inputs(500, spec.dims[0], spec.p, spec.B, seed, boundary_prob=0.5)
        pre, post = forward_trace(net, X)
        radii = propagate_norm_bound(net, spec.B, spec.q, spec.p)
        for z in pre[:-1]:
            assert np.all(spec.k * np.abs(z) ** (spec.k - 1) <= 1 + 1e-12)
        for i, h in enumerate(post):
            assert np.all(vector_norm(h, spec.p) <= radii[i + 1] * (1 + 1e-12))
