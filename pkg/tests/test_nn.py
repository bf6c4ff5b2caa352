import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st
from hypothesis.extra.numpy import arrays

from dscf.exceptions import DimensionError, DomainError, ParseError, StateError, TrainingError
from dscf.nn import ops
from dscf.nn.checkpoint import load_checkpoint, save_checkpoint
from dscf.nn.gradcheck import gradient_check
from dscf.nn.layers import LSTM, MLP, Embedding, Linear
from dscf.nn.optim import Adam, AdamState, adam_step
from dscf.nn.tensor import Parameter, Tensor

from oracles import scalar_lstm


def random_parameter(rng, *shape, name=None):
    return Parameter(rng.normal(size=shape), name=name)


class TestOperations:

    def test_composed_graph_gradients(self):
        rng = np.random.default_rng(0)
        params = {
            "table": random_parameter(rng, 5, 3),
            "weight": random_parameter(rng, 3, 4),
            "context": random_parameter(rng, 4),
            "scale": random_parameter(rng, 1),
        }
        indices = np.array([[0, 2], [4, 2], [1, 1]])

        def loss():
            rows = ops.take(params["table"], indices)
            hidden = ops.tanh(ops.matmul(rows, params["weight"]))
            scores = ops.matmul(hidden, params["context"])
            weights = ops.softmax(scores, axis=1)
            pooled = ops.sum(ops.mul(hidden, ops.reshape(weights, (3, 2, 1))), axis=1)
            mixed = ops.concat([ops.sigmoid(pooled), ops.flip(pooled, axis=1)], axis=-1)
            stacked = ops.stack([mixed, ops.relu(mixed)], axis=0)
            return ops.mean(ops.square(ops.sub(ops.mul(stacked[:, 1:], params["scale"]), 0.5)))

        errors = gradient_check(loss, params)
        assert max(errors.values()) < 1e-6

    def test_repeated_indices_accumulate(self):
        table = Parameter(np.zeros((3, 2)))
        ops.sum(ops.take(table, [1, 1, 2])).backward()
        np.testing.assert_array_equal(table.grad, [[0, 0], [2, 2], [1, 1]])

    def test_broadcast_gradient_is_reduced(self):
        bias = Parameter(np.zeros(3))
        ops.sum(ops.add(np.ones((4, 3)), bias)).backward()
        np.testing.assert_array_equal(bias.grad, [4, 4, 4])

    def test_take_out_of_range(self):
        with pytest.raises(DomainError):
            ops.take(Parameter(np.zeros((3, 2))), [3])

    def test_incompatible_shapes(self):
        with pytest.raises(DimensionError):
            ops.matmul(np.ones((2, 3)), np.ones((2, 3)))
        with pytest.raises(DimensionError):
            ops.add(np.ones((2, 3)), np.ones((4,)))

    @hypothesis_settings(deadline=None)
    @given(arrays(np.float64, (3, 5), elements=st.floats(-50, 50, allow_nan=False)))
    def test_softmax_is_a_distribution(self, scores):
        out = ops.softmax(scores, axis=1).data
        assert np.all(out >= 0)
        np.testing.assert_allclose(out.sum(axis=1), 1.0, atol=1e-6)

    def test_backward_needs_scalar(self):
        x = Parameter(np.ones(3))
        with pytest.raises(StateError):
            ops.mul(x, 2.0).backward()

    def test_backward_without_record(self):
        with pytest.raises(StateError):
            Tensor(np.ones(1)).backward()

    def test_record_is_consumed_once(self):
        x = Parameter(np.ones(2))
        loss = ops.sum(ops.square(x))
        loss.backward()
        with pytest.raises(StateError):
            loss.backward()


class TestDropout:

    def test_identity_in_evaluation(self):
        x = np.arange(6.0)
        out = ops.dropout(x, 0.5, training=False, rng=np.random.default_rng(0))
        np.testing.assert_array_equal(out.data, x)

    def test_inverted_scaling_keeps_expectation(self):
        out = ops.dropout(np.ones(200000), 0.3, training=True, rng=np.random.default_rng(1)).data
        assert np.all(np.isclose(out, 0.0) | np.isclose(out, 1 / 0.7))
        assert out.mean() == pytest.approx(1.0, abs=0.01)

    @pytest.mark.parametrize("rate", [-0.1, 1.0])
    def test_rate_outside_range(self, rate):
        with pytest.raises(DomainError):
            ops.dropout(np.ones(3), rate, training=True, rng=np.random.default_rng(0))

    def test_same_seed_same_mask(self):
        first = ops.dropout(np.ones(50), 0.5, True, np.random.default_rng(3)).data
        second = ops.dropout(np.ones(50), 0.5, True, np.random.default_rng(3)).data
        np.testing.assert_array_equal(first, second)


class TestLayers:

    def test_mlp_and_embedding_gradients(self, relu_margin):
        for seed in range(50):
            rng = np.random.default_rng(seed)
            embedding = Embedding(4, 3, rng)
            mlp = MLP(3, 5, 2, rng)

            def loss(embedding=embedding, mlp=mlp):
                return ops.mean(ops.square(mlp(embedding([0, 3, 3]))))

            if relu_margin(loss) > 1e-3:
                break
        else:
            pytest.fail("no seed keeps every ReLU input away from zero")
        params = {**{"embedding." + k: v for k, v in embedding.parameters().items()},
                  **{"mlp." + k: v for k, v in mlp.parameters().items()}}
        assert max(gradient_check(loss, params).values()) < 1e-6

    def test_parameter_names_follow_assignment_order(self):
        mlp = MLP(2, 3, 1, np.random.default_rng(0), n_hidden=1)
        assert list(mlp.parameters()) == ["hidden0.weight", "hidden0.bias", "output.weight", "output.bias"]

    def test_state_dict_round_trip(self):
        first = Linear(3, 2, np.random.default_rng(0))
        second = Linear(3, 2, np.random.default_rng(1))
        second.load_state_dict(first.state_dict())
        np.testing.assert_array_equal(second.weight.data, first.weight.data)

    def test_lstm_gradients(self):
        lstm = LSTM(2, 3, np.random.default_rng(4))
        x = Tensor(np.random.default_rng(5).normal(size=(2, 4, 2)))

        def loss():
            return ops.sum(ops.square(ops.concat([lstm(x), lstm(x, reverse=True)], axis=-1)))

        assert max(gradient_check(loss, lstm.parameters()).values()) < 1e-6

    def test_reversed_input_mirrors_backward_pass(self):
        lstm = LSTM(3, 2, np.random.default_rng(6))
        x = np.random.default_rng(8).normal(size=(2, 5, 3))
        backward = lstm(Tensor(x), reverse=True).data
        forward_on_reversed = lstm(Tensor(x[:, ::-1].copy())).data
        np.testing.assert_allclose(forward_on_reversed, backward[:, ::-1], atol=1e-12)


class TestLSTMOracle:

    @pytest.mark.parametrize("reverse", [False, True])
    def test_matches_scalar_recurrence(self, reverse):
        rng = np.random.default_rng(7)
        lstm = LSTM(2, 2, rng)
        lstm.weight.assign(rng.normal(size=(4, 8)))
        lstm.bias.assign(rng.normal(size=8))
        x = rng.normal(size=(3, 2))
        out = lstm(Tensor(x[None]), reverse=reverse).data[0]
        expected = scalar_lstm(x.tolist(), lstm.weight.data.tolist(), lstm.bias.data.tolist(), reverse)
        np.testing.assert_allclose(out, expected, rtol=0, atol=1e-10)


class TestAdam:

    def test_quadratic_converges(self):
        w = Parameter(np.zeros(1))
        optimizer = Adam({"w": w}, learning_rate=0.05)
        for _ in range(2000):
            ops.sum(ops.square(ops.sub(w, 3.0))).backward()
            optimizer.step()
            if abs(w.data[0] - 3.0) < 1e-3:
                break
        assert abs(w.data[0] - 3.0) < 1e-3

    def test_first_step_moves_by_learning_rate(self):
        w = Parameter(np.array([1.0, -1.0]))
        optimizer = Adam({"w": w}, learning_rate=0.1)
        w.grad = np.array([5.0, -0.01])
        optimizer.step()
        np.testing.assert_allclose(w.data, [0.9, -0.9], atol=1e-6)
        np.testing.assert_array_equal(w.grad, [0.0, 0.0])

    def test_zero_gradient_still_counts_a_step(self):
        w = Parameter(np.array([1.0, -2.0]))
        state = AdamState({"w": w}, learning_rate=0.1)
        w.grad = np.zeros(2)
        adam_step({"w": w}, state)
        np.testing.assert_array_equal(w.data, [1.0, -2.0])
        assert state.step_count == 1

    def test_non_finite_gradient_leaves_parameters(self):
        w = Parameter(np.array([1.0, 2.0]))
        optimizer = Adam({"w": w})
        w.grad = np.array([np.nan, 1.0])
        with pytest.raises(TrainingError) as error:
            optimizer.step()
        assert "w" in error.value.detail
        np.testing.assert_array_equal(w.data, [1.0, 2.0])


class TestCheckpoint:

    def test_round_trip(self, tmp_path):
        mlp = MLP(3, 4, 1, np.random.default_rng(0))
        save_checkpoint(tmp_path / "m.ckpt", mlp.state_dict(), {"epoch": 4})
        state, manifest = load_checkpoint(tmp_path / "m.ckpt")
        assert list(state) == list(mlp.state_dict())
        for name, values in mlp.state_dict().items():
            np.testing.assert_array_equal(state[name], values)
        assert manifest.metadata == {"epoch": "4"}

    def test_wrong_magic(self, tmp_path):
        path = tmp_path / "m.ckpt"
        path.write_bytes(b"NOTACKPT" + b"\x00" * 16)
        with pytest.raises(ParseError):
            load_checkpoint(path)

    def test_truncated_values(self, tmp_path):
        path = tmp_path / "m.ckpt"
        save_checkpoint(path, {"w": np.ones((4, 4))})
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ParseError):
            load_checkpoint(path)
