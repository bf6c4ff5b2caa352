import numpy as np
import pytest

from dscf.exceptions import ConfigurationError, DomainError
from dscf.model.dscf import DSCF, load_model, save_model
from dscf.model.variants import make_variant, shuffle_steps
from dscf.nn.gradcheck import gradient_check
from dscf.nn.tensor import Tensor
from dscf.schema.schemas import TrainConfig, VariantKind
from dscf.training.metrics import squared_loss

from oracles import scalar_attention, scalar_lstm

N_USERS, N_ITEMS, N_LEVELS = 6, 8, 5


def small_config(**overrides):
    values = dict(embedding_size=4, dropout=0.0, walk_length=3, num_walks=2, seed=0)
    values.update(overrides)
    return TrainConfig(**values)


def random_steps(rng, batch, count, length, with_padding=True):
    steps = np.stack([
        rng.integers(0, N_USERS, size=(batch, count, length)),
        rng.integers(0, N_ITEMS, size=(batch, count, length)),
        rng.integers(1, N_LEVELS + 1, size=(batch, count, length)),
    ], axis=-1)
    if with_padding:
        steps[0, -1, -1] = (N_USERS, N_ITEMS, 0)
    return steps


@pytest.fixture
def batch():
    rng = np.random.default_rng(12)
    users = np.array([0, 3, 5])
    items = np.array([1, 7, 2])
    return users, items, random_steps(rng, 3, 2, 3), np.array([4.0, 1.0, 3.0])


def build(kind="full", **overrides):
    return DSCF(N_USERS, N_ITEMS, N_LEVELS, small_config(**overrides), make_variant(kind), rating_offset=3.0)


def randomize(parameter, rng, scale=1.0):
    parameter.assign(rng.normal(scale=scale, size=parameter.shape))


def smooth_loss(kind, batch, relu_margin):
    """
    A model re-drawn at scale 0.5 whose ReLUs all stay clear of the kink on `batch`.
    """
    users, items, steps, targets = batch
    for seed in range(50):
        model = build(kind)
        rng = np.random.default_rng(seed)
        for parameter in model.parameters().values():
            randomize(parameter, rng, scale=0.5)

        def loss(model=model):
            return squared_loss(model(users, items, steps), targets)

        if relu_margin(loss) > 1e-3:
            return model, loss
    pytest.fail("no seed keeps every ReLU input away from zero")


class TestGradients:

    def test_every_parameter_group_matches_finite_differences(self, batch, relu_margin):
        model, loss = smooth_loss("full", batch, relu_margin)
        params = model.parameters()
        errors = gradient_check(loss, params, h=1e-5)
        groups = {name.split(".")[0] for name in params}
        assert groups == {"user_embedding", "item_embedding", "rating_embedding", "fusion", "forward_lstm",
                          "backward_lstm", "step_attention", "step_context", "sequence_attention",
                          "sequence_context", "user_head", "rating_head"}
        worst = max(errors, key=errors.get)
        assert errors[worst] < 1e-4, worst

    def test_attention_gradients_are_measurable(self, batch, relu_margin):
        model, loss = smooth_loss("full", batch, relu_margin)
        for parameter in model.parameters().values():
            parameter.zero_grad()
        loss().backward()
        for name in ("step_context", "sequence_context", "sequence_attention.weight"):
            assert np.abs(model.parameters()[name].grad).max() > 1e-6, name

    @pytest.mark.parametrize("kind", [k.value for k in VariantKind if k is not VariantKind.FULL])
    def test_variants_match_finite_differences(self, batch, relu_margin, kind):
        model, loss = smooth_loss(kind, batch, relu_margin)
        errors = gradient_check(loss, model.parameters())
        worst = max(errors, key=errors.get)
        assert errors[worst] < 1e-4, worst


class TestInteractionFusion:

    def test_rating_changes_the_interaction(self):
        model = build()
        rng = np.random.default_rng(5)
        for parameter in model.parameters().values():
            randomize(parameter, rng)
        e = model.fuse_interactions(np.array([[[1, 2, 3], [1, 2, 5]]])).data[0]
        assert e.shape == (2, 4)
        assert not np.allclose(e[0], e[1])

    def test_zero_fusion_weights_give_zero_vector(self):
        model = build()
        for parameter in model.fusion.parameters().values():
            parameter.assign(np.zeros(parameter.shape))
        e = model.fuse_interactions(np.array([[[1, 2, 3], [4, 5, 1]]])).data
        np.testing.assert_array_equal(e, np.zeros((1, 2, 4)))


class TestSequenceEncoder:

    def test_bidirectional_lstm_with_step_attention(self):
        rng = np.random.default_rng(21)
        model = build(embedding_size=2, num_walks=1)
        for parameter in (model.forward_lstm.weight, model.forward_lstm.bias, model.backward_lstm.weight,
                          model.backward_lstm.bias, model.step_attention.weight, model.step_attention.bias,
                          model.step_context):
            randomize(parameter, rng)
        x = rng.normal(size=(3, 2))

        out = model.encode_sequences(Tensor(x[None])).data[0]

        forward = scalar_lstm(x.tolist(), model.forward_lstm.weight.data.tolist(),
                              model.forward_lstm.bias.data.tolist())
        backward = scalar_lstm(x.tolist(), model.backward_lstm.weight.data.tolist(),
                               model.backward_lstm.bias.data.tolist(), reverse=True)
        states = [f + b for f, b in zip(forward, backward)]
        alpha, pooled = scalar_attention(states, model.step_attention.weight.data.tolist(),
                                         model.step_attention.bias.data.tolist(),
                                         model.step_context.data.tolist())
        np.testing.assert_allclose(out, pooled, rtol=0, atol=1e-10)
        np.testing.assert_allclose(model._last_alpha[0], alpha, rtol=0, atol=1e-10)

    def test_sequence_attention_by_hand(self):
        rng = np.random.default_rng(22)
        model = build(embedding_size=2)
        for parameter in (model.sequence_attention.weight, model.sequence_attention.bias, model.sequence_context):
            randomize(parameter, rng)
        reps = rng.normal(size=(1, 3, 4))

        out = model.aggregate_sequences(Tensor(reps)).data[0]

        beta, pooled = scalar_attention(reps[0].tolist(), model.sequence_attention.weight.data.tolist(),
                                        model.sequence_attention.bias.data.tolist(),
                                        model.sequence_context.data.tolist())
        np.testing.assert_allclose(out, pooled, rtol=0, atol=1e-10)
        np.testing.assert_allclose(model._last_beta[0], beta, rtol=0, atol=1e-10)

    def test_single_step_gets_all_weight(self):
        rng = np.random.default_rng(3)
        model = build(walk_length=1)
        alpha, beta = model.attention_weights([0, 1], [2, 3], random_steps(rng, 2, 2, 1, with_padding=False))
        np.testing.assert_array_equal(alpha, np.ones((2, 2, 1)))
        np.testing.assert_allclose(beta.sum(axis=1), 1.0, atol=1e-12)

    def test_identical_sequences_aggregate_to_themselves(self):
        model = build()
        rep = np.random.default_rng(4).normal(size=8)
        out = model.aggregate_sequences(Tensor(np.tile(rep, (1, 3, 1)))).data[0]
        np.testing.assert_allclose(out, rep, atol=1e-12)

    def test_attention_weights_are_distributions(self, batch):
        users, items, steps, _ = batch
        alpha, beta = build().attention_weights(users, items, steps)
        assert alpha.shape == (3, 2, 3) and beta.shape == (3, 2)
        assert np.all(alpha >= 0) and np.all(beta >= 0)
        np.testing.assert_allclose(alpha.sum(axis=-1), 1.0, atol=1e-6)
        np.testing.assert_allclose(beta.sum(axis=-1), 1.0, atol=1e-6)


class TestPrediction:

    def test_zero_output_weights_predict_the_bias(self, batch):
        users, items, steps, _ = batch
        model = build()
        model.rating_head.output.weight.assign(np.zeros((4, 1)))
        np.testing.assert_array_equal(model(users, items, steps).data, [3.0, 3.0, 3.0])

    @pytest.mark.parametrize("bias, expected", [(9.0, 5.0), (-3.0, 1.0), (2.5, 2.5)])
    def test_evaluation_clamps_to_scale(self, batch, bias, expected):
        users, items, steps, _ = batch
        model = build()
        model.rating_head.output.weight.assign(np.zeros((4, 1)))
        model.rating_head.output.bias.assign([bias])
        np.testing.assert_array_equal(model.predict_ratings(users, items, steps), [expected] * 3)

    @pytest.mark.parametrize("kind", [k.value for k in VariantKind])
    def test_all_padding_stays_finite(self, kind):
        model = build(kind)
        steps = np.tile(np.array([N_USERS, N_ITEMS, 0]), (2, 2, 3, 1))
        assert np.all(np.isfinite(model.predict_ratings([0, 1], [0, 1], steps)))

    def test_step_outside_tables(self, batch):
        users, items, steps, _ = batch
        steps = steps.copy()
        steps[1, 0, 0, 0] = N_USERS + 1
        with pytest.raises(DomainError):
            build()(users, items, steps)

    def test_same_seed_same_network(self, batch):
        users, items, steps, _ = batch
        np.testing.assert_array_equal(build().predict_ratings(users, items, steps),
                                      build().predict_ratings(users, items, steps))

    def test_dropout_is_off_in_evaluation(self, batch):
        users, items, steps, _ = batch
        model = build(dropout=0.5)
        np.testing.assert_array_equal(model.predict_ratings(users, items, steps),
                                      model.predict_ratings(users, items, steps))
        assert model.training


class TestPaddingMask:

    def test_masked_steps_get_no_weight(self):
        rng = np.random.default_rng(5)
        steps = random_steps(rng, 2, 2, 3, with_padding=False)
        steps[0, 0, 2] = (N_USERS, N_ITEMS, 0)
        steps[1, 1] = (N_USERS, N_ITEMS, 0)
        alpha, _ = build(mask_padding=True).attention_weights([0, 1], [0, 1], steps)
        assert alpha[0, 0, 2] == 0.0
        np.testing.assert_allclose(alpha[0, 0, :2].sum(), 1.0, atol=1e-12)
        assert np.all(np.isfinite(alpha[1, 1]))
        np.testing.assert_allclose(alpha[1, 1].sum(), 1.0, atol=1e-12)

    def test_padding_is_attended_by_default(self):
        rng = np.random.default_rng(5)
        steps = random_steps(rng, 1, 1, 3, with_padding=False)
        steps[0, 0, 2] = (N_USERS, N_ITEMS, 0)
        alpha, _ = build().attention_weights([0], [0], steps)
        assert alpha[0, 0, 2] > 0.0


class TestVariants:

    def test_unknown_kind(self):
        with pytest.raises(ConfigurationError) as error:
            make_variant("no_everything")
        assert "shuffling" in error.value.detail

    def test_no_opinion_ignores_ratings(self, batch):
        users, items, steps, _ = batch
        model = build("no_opinion")
        other = steps.copy()
        other[..., 2] = np.where(other[..., 2] > 0, 6 - other[..., 2], 0)
        assert model.fusion.hidden0.weight.shape == (8, 4)
        np.testing.assert_array_equal(model.predict_ratings(users, items, steps),
                                      model.predict_ratings(users, items, other))

    def test_no_item_opinion_ignores_items_and_ratings(self, batch):
        users, items, steps, _ = batch
        model = build("no_item_opinion")
        other = steps.copy()
        other[..., 1] = np.where(other[..., 2] > 0, (other[..., 1] + 3) % N_ITEMS, N_ITEMS)
        other[..., 2] = np.where(other[..., 2] > 0, 1, 0)
        assert model.fusion.hidden0.weight.shape == (4, 4)
        np.testing.assert_array_equal(model.predict_ratings(users, items, steps),
                                      model.predict_ratings(users, items, other))

    def test_averaging_uses_uniform_step_weights(self, batch):
        users, items, steps, _ = batch
        model = build("averaging")
        assert not any(name.startswith(("forward_lstm", "step_")) for name in model.parameters())
        alpha, beta = model.attention_weights(users, items, steps)
        np.testing.assert_allclose(alpha, 1 / 3)
        assert not np.allclose(beta, 0.5)

    def test_no_attention_uses_uniform_weights(self, batch):
        users, items, steps, _ = batch
        model = build("no_attention")
        assert "forward_lstm.weight" in model.parameters()
        alpha, beta = model.attention_weights(users, items, steps)
        np.testing.assert_allclose(alpha, 1 / 3)
        np.testing.assert_allclose(beta, 0.5)

    def test_identity_shuffle_is_the_full_model(self, batch):
        users, items, steps, _ = batch
        full = build("full")
        shuffling = build("shuffling")
        shuffling.permute = lambda s, u, v: s
        np.testing.assert_array_equal(full.predict_ratings(users, items, steps),
                                      shuffling.predict_ratings(users, items, steps))

    def test_shuffle_permutes_steps_within_each_sequence(self, batch):
        users, items, steps, _ = batch
        shuffled = shuffle_steps(steps, users, items, seed=0)
        for b in range(3):
            for h in range(2):
                assert sorted(map(tuple, shuffled[b, h])) == sorted(map(tuple, steps[b, h]))
        np.testing.assert_array_equal(shuffled, shuffle_steps(steps, users, items, seed=0))
        np.testing.assert_array_equal(build("shuffling").predict_ratings(users, items, steps),
                                      build("full").predict_ratings(users, items, shuffled))


class TestModelCheckpoint:

    def test_round_trip_predicts_the_same(self, batch, tmp_path):
        users, items, steps, _ = batch
        model = build("no_opinion", dropout=0.3)
        randomize(model.sequence_context, np.random.default_rng(9))
        save_model(tmp_path / "model.ckpt", model, {"best_epoch": "4"})
        loaded, meta = load_model(tmp_path / "model.ckpt")
        assert loaded.variant.kind is VariantKind.NO_OPINION
        assert meta["best_epoch"] == "4"
        assert loaded.config == model.config
        np.testing.assert_array_equal(loaded.predict_ratings(users, items, steps),
                                      model.predict_ratings(users, items, steps))
