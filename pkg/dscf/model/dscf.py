"""
The deep social collaborative filtering network.

A batch of target pairs arrives with its item-aware sequences as an integer
array of shape (B, H, l, 3). Every (neighbor, item, rating) step is fused into
an interaction embedding, each sequence is read by a bidirectional LSTM and
pooled by step attention, the H sequence vectors are pooled by sequence
attention, and two MLP heads turn the result into a rating.
"""
import json
from typing import Dict, Optional, Tuple

import numpy as np

from dscf.exceptions import DomainError
from dscf.nn import ops
from dscf.nn.checkpoint import load_checkpoint, save_checkpoint
from dscf.nn.layers import LSTM, MLP, Embedding, Linear, Module, uniform
from dscf.nn.tensor import Parameter, Tensor
from dscf.model.variants import VariantConfig, make_variant, shuffle_steps
from dscf.schema.schemas import TrainConfig
from dscf.utils.rng import make_rng

MASKED_SCORE = -1e9


def _uniform_weights(rows: int, width: int, dtype) -> Tensor:
    return Tensor(np.full((rows, width), 1.0 / width, dtype=dtype))


class DSCF(Module):
    """
    Embedding tables P, Q, R carry one extra padding row each (user n_users,
    item n_items, rating 0).
    """

    def __init__(self, n_users: int, n_items: int, n_levels: int, config: TrainConfig,
                 variant: Optional[VariantConfig] = None, rating_offset: float = 0.0):
        super().__init__()
        variant = variant or make_variant("full")
        d = config.embedding_size
        rng = np.random.default_rng(config.seed)
        dropout_rng = make_rng(config.seed, 1)
        object.__setattr__(self, "n_users", n_users)
        object.__setattr__(self, "n_items", n_items)
        object.__setattr__(self, "n_levels", n_levels)
        object.__setattr__(self, "config", config)
        object.__setattr__(self, "variant", variant)
        object.__setattr__(self, "permute", lambda steps, users, items: shuffle_steps(steps, users, items, config.seed))
        object.__setattr__(self, "last_attention", None)

        self.user_embedding = Embedding(n_users + 1, d, rng)
        self.item_embedding = Embedding(n_items + 1, d, rng)
        self.rating_embedding = Embedding(n_levels + 1, d, rng)
        fusion_in = d * (1 + int(variant.use_rating) + int(variant.use_item))
        self.fusion = MLP(fusion_in, d, d, rng, dropout=config.dropout, dropout_rng=dropout_rng)
        if variant.recurrent:
            self.forward_lstm = LSTM(d, d, rng)
            self.backward_lstm = LSTM(d, d, rng)
            if variant.attention:
                self.step_attention = Linear(2 * d, 2 * d, rng)
                self.step_context = Parameter(uniform(rng, (2 * d,), 1.0 / np.sqrt(2 * d)))
        if variant.attention:
            self.sequence_attention = Linear(2 * d, 2 * d, rng)
            self.sequence_context = Parameter(uniform(rng, (2 * d,), 1.0 / np.sqrt(2 * d)))
        self.user_head = MLP(3 * d, d, d, rng, dropout=config.dropout, dropout_rng=dropout_rng)
        self.rating_head = MLP(2 * d, d, 1, rng, dropout=config.dropout, dropout_rng=dropout_rng)
        self.rating_head.output.bias.assign([rating_offset])

    @property
    def padding(self) -> Tuple[int, int, int]:
        return self.n_users, self.n_items, 0

    def fuse_interactions(self, steps: np.ndarray) -> Tensor:
        """
        e_k = g([p_k, r_k, q_k]) for every step; the last axis of `steps` holds (neighbor, item, rating).

        Raises:
            DomainError: A step index lies outside the extended tables.
        """
        parts = [self.user_embedding(steps[..., 0])]
        if self.variant.use_rating:
            parts.append(self.rating_embedding(steps[..., 2]))
        if self.variant.use_item:
            parts.append(self.item_embedding(steps[..., 1]))
        return self.fusion(ops.concat(parts, axis=-1))

    def encode_sequences(self, interactions: Tensor, padding_mask: Optional[np.ndarray] = None) -> Tensor:
        """
        Pool each sequence of interaction embeddings, shape (n, l, d), into one vector of width 2d.

        Args:
            interactions: Interaction embeddings of n sequences.
            padding_mask: (n, l) flags of padding steps; only consulted when
                padding masking is enabled.

        Raises:
            DomainError: Sequences of length 0.

        Returns:
            Tensor: (n, 2d) step-attention weighted sums of the Bi-LSTM states.
        """
        n, length = interactions.shape[0], interactions.shape[1]
        if length < 1:
            raise DomainError("cannot encode an empty sequence")
        if self.variant.recurrent:
            states = ops.concat([self.forward_lstm(interactions),
                                 self.backward_lstm(interactions, reverse=True)], axis=-1)
        else:
            states = ops.concat([interactions, interactions], axis=-1)

        if self.variant.recurrent and self.variant.attention:
            scores = ops.matmul(ops.tanh(self.step_attention(states)), self.step_context)
            if self.config.mask_padding and padding_mask is not None:
                masked = padding_mask & ~padding_mask.all(axis=1, keepdims=True)
                scores = ops.add(scores, np.where(masked, MASKED_SCORE, 0.0).astype(scores.data.dtype))
            alpha = ops.softmax(scores, axis=1)
        else:
            alpha = _uniform_weights(n, length, states.data.dtype)
        object.__setattr__(self, "_last_alpha", alpha.data)
        return ops.sum(ops.mul(states, ops.reshape(alpha, (n, length, 1))), axis=1)

    def aggregate_sequences(self, representations: Tensor) -> Tensor:
        """
        s = sum_i beta_i s_i over the H sequence vectors of each pair, (B, H, 2d) -> (B, 2d).
        """
        batch, count = representations.shape[0], representations.shape[1]
        if count < 1:
            raise DomainError("cannot aggregate zero sequences")
        if self.variant.attention:
            scores = ops.matmul(ops.tanh(self.sequence_attention(representations)), self.sequence_context)
            beta = ops.softmax(scores, axis=1)
        else:
            beta = _uniform_weights(batch, count, representations.data.dtype)
        object.__setattr__(self, "_last_beta", beta.data)
        return ops.sum(ops.mul(representations, ops.reshape(beta, (batch, count, 1))), axis=1)

    def predict(self, users, items, social: Tensor) -> Tensor:
        """
        r' = f_uv([q_v, f_us([p_u, s])]), unclamped, shape (B,).
        """
        user_state = self.user_head(ops.concat([self.user_embedding(users), social], axis=-1))
        out = self.rating_head(ops.concat([self.item_embedding(items), user_state], axis=-1))
        return ops.reshape(out, (-1,))

    def __call__(self, users, items, steps: np.ndarray) -> Tensor:
        users = np.asarray(users, dtype=np.int64)
        items = np.asarray(items, dtype=np.int64)
        steps = np.asarray(steps, dtype=np.int64)
        batch, count, length = steps.shape[:3]
        if self.variant.shuffle:
            steps = self.permute(steps, users, items)
        interactions = self.fuse_interactions(steps)
        encoded = self.encode_sequences(ops.reshape(interactions, (batch * count, length, -1)),
                                        steps[..., 2].reshape(batch * count, length) == 0)
        social = self.aggregate_sequences(ops.reshape(encoded, (batch, count, -1)))
        object.__setattr__(self, "last_attention",
                           (self._last_alpha.reshape(batch, count, length), self._last_beta))
        return self.predict(users, items, social)

    def predict_ratings(self, users, items, steps: np.ndarray) -> np.ndarray:
        """
        Evaluation-mode predictions clamped to [1, n_levels].
        """
        mode = self.training
        self.eval()
        try:
            raw = self(users, items, steps).data
        finally:
            self.train(mode)
        return np.clip(raw.astype(np.float64), 1.0, float(self.n_levels))

    def attention_weights(self, users, items, steps: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Step weights alpha, shape (B, H, l), and sequence weights beta, shape (B, H), in evaluation mode.
        """
        self.predict_ratings(users, items, steps)
        return self.last_attention


def save_model(path, model: DSCF, metadata: Optional[Dict[str, str]] = None) -> None:
    meta = {
        "variant": model.variant.kind.value,
        "n_users": model.n_users,
        "n_items": model.n_items,
        "n_levels": model.n_levels,
        "train_config": model.config.json(),
    }
    meta.update(metadata or {})
    save_checkpoint(path, model.state_dict(), meta)


def load_model(path) -> Tuple[DSCF, Dict[str, str]]:
    """
    Rebuild a model from a checkpoint written by `save_model`.

    Raises:
        ParseError: The checkpoint is unreadable.
        ConfigurationError: The recorded variant is unknown.
    """
    state, manifest = load_checkpoint(path)
    meta = manifest.metadata
    config = TrainConfig(**json.loads(meta["train_config"]))
    model = DSCF(int(meta["n_users"]), int(meta["n_items"]), int(meta["n_levels"]), config,
                 make_variant(meta["variant"]))
    model.load_state_dict(state)
    return model, meta
