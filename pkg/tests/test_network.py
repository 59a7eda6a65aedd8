"""Tests for the from-scratch network core: forward, loss, deltas, updates.

Expected numbers are frozen from hand evaluation of the defining formulas
(sigmoid chains, half-squared-error, the delta recursion, and the momentum
unroll), independent of the implementation.
"""

import numpy as np
import pytest

from glovespot import (
    DimensionError,
    InvalidTopologyError,
    MomentumState,
    TrainConfig,
    apply_update,
    backprop_deltas,
    forward,
    grad_check,
    init_network,
    loss,
    sigmoid,
    sigmoid_deriv,
    train,
)
from glovespot.network import Network

# Hand-computed constants.
SIGMOID_4 = 0.9820137900379085  # 1/(1+e^-4)
SIGMOID_1 = 0.7310585786300049
CHAIN_1_1_1 = 0.6750375273768237  # sigmoid(sigmoid(1))
DERIV_AT_S4 = 0.017662706213291107  # s4*(1-s4)
DELTA_CHAIN = (1.0 - CHAIN_1_1_1) * CHAIN_1_1_1 * (1.0 - CHAIN_1_1_1)  # 0.07128437...


def tiny_chain():
    """1-1-1 network with unit weights and zero biases."""
    net = init_network([1, 1, 1], seed=0)
    net.weights = [np.array([[1.0]]), np.array([[1.0]])]
    net.biases = [np.array([0.0]), np.array([0.0])]
    return net


class TestSigmoid:
    def test_midpoint(self):
        assert sigmoid(0.0) == 0.5

    def test_known_value(self):
        assert sigmoid(4.0) == pytest.approx(SIGMOID_4, rel=1e-14)

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        v = rng.normal(0, 5, 50)
        np.testing.assert_allclose(sigmoid(v) + sigmoid(-v), 1.0, atol=1e-14)

    def test_extreme_inputs_stay_finite(self):
        assert sigmoid(1000.0) == pytest.approx(1.0)
        assert sigmoid(-1000.0) == pytest.approx(0.0)
        assert np.isfinite(sigmoid(np.array([-1000.0, 1000.0]))).all()

    def test_array_shape(self):
        out = sigmoid(np.zeros((7,)))
        assert out.shape == (7,)
        assert np.all(out == 0.5)


class TestSigmoidDeriv:
    def test_peak(self):
        assert sigmoid_deriv(0.5) == 0.25

    def test_known_value(self):
        assert sigmoid_deriv(sigmoid(4.0)) == pytest.approx(DERIV_AT_S4, rel=1e-12)

    def test_saturation(self):
        assert sigmoid_deriv(1e-9) < 1e-8
        assert sigmoid_deriv(1 - 1e-9) < 1e-8


class TestInitNetwork:
    def test_fig4_topology_shapes(self):
        net = init_network([44, 44, 10], seed=7)
        assert net.weights[0].shape == (44, 44)
        assert net.weights[1].shape == (10, 44)
        assert net.biases[0].shape == (44,)
        assert net.biases[1].shape == (10,)

    def test_two_layers_rejected(self):
        with pytest.raises(InvalidTopologyError):
            init_network([44, 10], seed=0)

    def test_zero_layer_size_rejected(self):
        with pytest.raises(InvalidTopologyError):
            init_network([4, 0, 2], seed=0)

    def test_deterministic(self):
        a = init_network([6, 5, 4], seed=11)
        b = init_network([6, 5, 4], seed=11)
        for wa, wb in zip(a.weights, b.weights):
            assert np.array_equal(wa, wb)

    def test_bounds_and_zero_biases(self):
        net = init_network([16, 9, 4], seed=2)
        for fan_in, w in zip([16, 9], net.weights):
            r = 1.0 / np.sqrt(fan_in)
            assert np.all(np.abs(w) <= r)
        assert all(np.all(b == 0) for b in net.biases)

    def test_seed_changes_weights(self):
        a = init_network([6, 5, 4], seed=1)
        b = init_network([6, 5, 4], seed=2)
        assert not np.array_equal(a.weights[0], b.weights[0])


class TestForward:
    def test_zero_net_gives_half(self):
        net = init_network([3, 4, 2], seed=0)
        net.weights = [np.zeros_like(w) for w in net.weights]
        trace = forward(net, [0.3, 0.9, 0.1])
        assert np.all(trace.activations[1] == 0.5)
        assert np.all(trace.output == 0.5)

    def test_chain_value(self):
        trace = forward(tiny_chain(), [1.0])
        assert trace.output[0] == pytest.approx(CHAIN_1_1_1, rel=1e-14)

    def test_output_width(self):
        net = init_network([44, 44, 10], seed=5)
        trace = forward(net, np.linspace(0, 1, 44))
        assert trace.output.shape == (10,)

    def test_dimension_mismatch(self):
        net = init_network([5, 4, 3], seed=0)
        with pytest.raises(DimensionError):
            forward(net, np.zeros(6))

    def test_trace_consistency(self):
        net = init_network([5, 4, 3], seed=9)
        trace = forward(net, np.random.default_rng(0).uniform(0, 1, 5))
        for v, y in zip(trace.locals_, trace.activations[1:]):
            np.testing.assert_allclose(sigmoid(v), y, rtol=1e-15)


class TestLoss:
    def test_zero_residual(self):
        assert loss([0.2, 0.8], [0.2, 0.8]) == 0.0

    def test_known_value(self):
        assert loss([0.0, 0.0], [1.0, 0.0]) == 0.5

    def test_symmetry(self):
        rng = np.random.default_rng(4)
        a, b = rng.uniform(0, 1, 6), rng.uniform(0, 1, 6)
        assert loss(a, b) == loss(b, a)

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            loss([0.1, 0.2], [0.1, 0.2, 0.3])


class TestBackpropDeltas:
    def test_zero_residual_gives_zero_output_delta(self):
        net = init_network([5, 4, 3], seed=1)
        x = np.linspace(0, 1, 5)
        trace = forward(net, x)
        deltas = backprop_deltas(net, trace, trace.output.copy())
        assert np.all(deltas[-1] == 0.0)

    def test_chain_delta_value(self):
        net = tiny_chain()
        trace = forward(net, [1.0])
        deltas = backprop_deltas(net, trace, [1.0])
        assert deltas[-1][0] == pytest.approx(DELTA_CHAIN, rel=1e-12)

    def test_layer_shapes(self):
        net = init_network([10, 8, 4], seed=3)
        trace = forward(net, np.zeros(10))
        deltas = backprop_deltas(net, trace, np.zeros(4))
        assert [d.shape for d in deltas] == [(8,), (4,)]

    def test_bad_target_width(self):
        net = init_network([5, 4, 3], seed=1)
        trace = forward(net, np.zeros(5))
        with pytest.raises(DimensionError):
            backprop_deltas(net, trace, np.zeros(4))

    def test_stale_trace_rejected(self):
        a = init_network([5, 4, 3], seed=1)
        b = init_network([5, 6, 3], seed=1)
        trace = forward(b, np.zeros(5))
        with pytest.raises(DimensionError):
            backprop_deltas(a, trace, np.zeros(3))


class TestApplyUpdate:
    def make_parts(self, seed=0):
        net = init_network([5, 4, 3], seed=seed)
        rng = np.random.default_rng(seed + 100)
        x = rng.uniform(0, 1, 5)
        t = rng.uniform(0, 1, 3)
        trace = forward(net, x)
        deltas = backprop_deltas(net, trace, t)
        return net, trace, deltas

    def test_zero_alpha_zero_state_is_identity(self):
        net, trace, deltas = self.make_parts()
        cfg = TrainConfig(learning_rate=0.0, momentum=0.5, epochs=1)
        out, _ = apply_update(net, deltas, trace, cfg, MomentumState.zeros_for(net))
        for w0, w1 in zip(net.weights, out.weights):
            assert np.array_equal(w0, w1)

    def test_beta_zero_is_plain_increment(self):
        net, trace, deltas = self.make_parts()
        cfg = TrainConfig(learning_rate=0.3, momentum=0.0, epochs=1)
        out, _ = apply_update(net, deltas, trace, cfg, MomentumState.zeros_for(net))
        for i in range(len(net.weights)):
            expected_w = net.weights[i] + 0.3 * np.outer(deltas[i], trace.activations[i])
            np.testing.assert_allclose(out.weights[i], expected_w, rtol=1e-15)
            expected_b = net.biases[i] + 0.3 * deltas[i]
            np.testing.assert_allclose(out.biases[i], expected_b, rtol=1e-15)

    def test_second_identical_step_is_one_and_a_half_times(self):
        net, trace, deltas = self.make_parts(seed=5)
        cfg = TrainConfig(learning_rate=0.2, momentum=0.5, epochs=1)
        state = MomentumState.zeros_for(net)
        n1, state = apply_update(net, deltas, trace, cfg, state)
        n2, state = apply_update(n1, deltas, trace, cfg, state)
        for i in range(len(net.weights)):
            first = n1.weights[i] - net.weights[i]
            second = n2.weights[i] - n1.weights[i]
            np.testing.assert_allclose(second, 1.5 * first, rtol=1e-9, atol=1e-12)

    def test_momentum_unroll_matches_geometric_sum(self):
        # k-th applied step under a constant gradient is step1*(1-beta^k)/(1-beta)
        for beta in (0.0, 0.1, 0.5, 0.9):
            net, trace, deltas = self.make_parts(seed=8)
            cfg = TrainConfig(learning_rate=0.1, momentum=beta, epochs=1)
            state = MomentumState.zeros_for(net)
            raw = [0.1 * np.outer(d, trace.activations[i]) for i, d in enumerate(deltas)]
            prev = net
            for k in range(1, 21):
                cur, state = apply_update(prev, deltas, trace, cfg, state)
                factor = (1.0 - beta**k) / (1.0 - beta) if beta < 1 else float(k)
                for i in range(len(net.weights)):
                    np.testing.assert_allclose(
                        cur.weights[i] - prev.weights[i], raw[i] * factor, atol=1e-12
                    )
                prev = cur

    def test_input_net_is_not_mutated(self):
        net, trace, deltas = self.make_parts(seed=2)
        snapshot = [w.copy() for w in net.weights]
        cfg = TrainConfig(learning_rate=0.4, momentum=0.3, epochs=1)
        apply_update(net, deltas, trace, cfg, MomentumState.zeros_for(net))
        for w0, w1 in zip(snapshot, net.weights):
            assert np.array_equal(w0, w1)

    def test_state_shape_mismatch(self):
        net, trace, deltas = self.make_parts()
        other = init_network([5, 6, 3], seed=0)
        cfg = TrainConfig()
        with pytest.raises(DimensionError):
            apply_update(net, deltas, trace, cfg, MomentumState.zeros_for(other))


class TestTrainConfig:
    def test_rate_bounds(self):
        with pytest.raises(ValueError):
            TrainConfig(learning_rate=1.5)
        with pytest.raises(ValueError):
            TrainConfig(momentum=-0.1)
        with pytest.raises(ValueError):
            TrainConfig(epochs=0)


class TestTrain:
    def test_fixed_point_dataset(self):
        # target equals the untrained output: zero deltas, nothing should move
        net = init_network([3, 3, 2], seed=4)
        x = np.array([0.1, 0.5, 0.9])
        target = forward(net, x).output.copy()
        cfg = TrainConfig(learning_rate=0.5, momentum=0.5, epochs=20, rng_seed=0)
        out, history = train(net, [(x, target)], cfg)
        assert len(set(history)) == 1
        for w0, w1 in zip(net.weights, out.weights):
            assert np.array_equal(w0, w1)

    def test_empty_dataset(self):
        net = init_network([3, 3, 2], seed=4)
        with pytest.raises(ValueError):
            train(net, [], TrainConfig(epochs=1))

    def test_loss_decreases(self):
        net = init_network([2, 3, 1], seed=7)
        data = [
            (np.array([0.0, 0.0]), np.array([0.0])),
            (np.array([1.0, 1.0]), np.array([1.0])),
        ]
        _, history = train(net, data, TrainConfig(learning_rate=0.5, momentum=0.1, epochs=300, rng_seed=1))
        assert history[-1] < history[0]

    def test_deterministic_for_seed(self):
        data = [
            (np.array([0.0, 1.0]), np.array([1.0])),
            (np.array([1.0, 0.0]), np.array([1.0])),
            (np.array([1.0, 1.0]), np.array([0.0])),
        ]
        cfg = TrainConfig(learning_rate=0.3, momentum=0.2, epochs=50, rng_seed=9)
        a, ha = train(init_network([2, 2, 1], seed=3), data, cfg)
        b, hb = train(init_network([2, 2, 1], seed=3), data, cfg)
        assert ha == hb
        for wa, wb in zip(a.weights, b.weights):
            assert np.array_equal(wa, wb)

    def test_matrix_dataset_form(self):
        X = np.array([[0.0, 0.0], [1.0, 1.0]])
        T = np.array([[0.0], [1.0]])
        cfg = TrainConfig(learning_rate=0.5, momentum=0.0, epochs=10, rng_seed=0)
        out, history = train(init_network([2, 2, 1], seed=0), (X, T), cfg)
        assert len(history) == 10
        assert out.trained_epochs == 10
        assert out.alpha == 0.5

    def test_stop_loss_shortens_history(self):
        net = init_network([3, 3, 2], seed=4)
        x = np.array([0.1, 0.5, 0.9])
        target = forward(net, x).output.copy()  # loss is 0 from epoch one
        cfg = TrainConfig(epochs=100, stop_loss=1e-6)
        _, history = train(net, [(x, target)], cfg)
        assert len(history) == 1

    def test_width_mismatch(self):
        net = init_network([3, 3, 2], seed=4)
        with pytest.raises(DimensionError):
            train(net, [(np.zeros(4), np.zeros(2))], TrainConfig(epochs=1))


class TestGradCheck:
    def test_random_small_net(self):
        rng = np.random.default_rng(12)
        net = init_network([5, 4, 3], seed=12)
        err = grad_check(net, rng.uniform(0, 1, 5), rng.uniform(0, 1, 3))
        assert err < 1e-4

    def test_zero_residual(self):
        net = init_network([5, 4, 3], seed=2)
        x = np.linspace(0, 1, 5)
        target = forward(net, x).output.copy()
        assert grad_check(net, x, target) < 1e-4

    def test_invalid_h(self):
        net = init_network([5, 4, 3], seed=2)
        with pytest.raises(ValueError):
            grad_check(net, np.zeros(5), np.zeros(3), h=0.0)

    def test_sweep_over_shapes(self):
        # the acceptance suite runs the full 100-net sweep; a fast slice here
        rng = np.random.default_rng(99)
        for shape in ([5, 4, 3], [10, 8, 4]):
            for trial in range(5):
                net = init_network(shape, seed=int(rng.integers(0, 2**31)))
                x = rng.uniform(0, 1, shape[0])
                t = rng.uniform(0, 1, shape[-1])
                assert grad_check(net, x, t) < 1e-4


class TestNetworkValidate:
    def test_valid_passes(self):
        init_network([4, 4, 2], seed=0).validate()

    def test_bad_shape_caught(self):
        net = init_network([4, 4, 2], seed=0)
        net.weights[0] = np.zeros((3, 4))
        with pytest.raises(DimensionError):
            net.validate()

    def test_nonfinite_caught(self):
        net = init_network([4, 4, 2], seed=0)
        net.weights[1][0, 0] = np.nan
        with pytest.raises(InvalidTopologyError):
            net.validate()

    def test_copy_is_deep(self):
        net = init_network([4, 4, 2], seed=0)
        dup = net.copy()
        dup.weights[0][0, 0] += 1.0
        assert net.weights[0][0, 0] != dup.weights[0][0, 0]
