"""
NeuMF pretraining of item feature vectors, plus the truncated-SVD fallback.
"""
from typing import List, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import svds

from dscf import data
from dscf.dataset.split import RatingDataset
from dscf.exceptions import DomainError
from dscf.features.similarity import ItemFeatureTable
from dscf.nn import ops
from dscf.nn.layers import MLP, Embedding, Linear
from dscf.schema.schemas import NeuMFConfig
from dscf.training.pairwise import PairModel, fit_pair_model
from dscf.utils.logger import log

MODULE_NAME = "neumf"


class NeuMF(PairModel):
    """
    Generalized matrix factorization and MLP branches with separate embeddings,
    fused by a linear output layer on top of the train-mean rating.
    """

    def __init__(self, n_users: int, n_items: int, dim: int, rng: np.random.Generator, offset: float = 0.0):
        super().__init__()
        object.__setattr__(self, "offset", float(offset))
        self.gmf_user = Embedding(n_users, dim, rng)
        self.gmf_item = Embedding(n_items, dim, rng)
        self.mlp_user = Embedding(n_users, dim, rng)
        self.mlp_item = Embedding(n_items, dim, rng)
        self.tower = MLP(2 * dim, dim, dim, rng)
        self.head = Linear(2 * dim, 1, rng)

    def __call__(self, users, items):
        gmf = ops.mul(self.gmf_user(users), self.gmf_item(items))
        mlp = ops.relu(self.tower(ops.concat([self.mlp_user(users), self.mlp_item(items)], axis=-1)))
        out = self.head(ops.concat([gmf, mlp], axis=-1))
        return ops.add(ops.reshape(out, (-1,)), self.offset)

    def item_features(self) -> ItemFeatureTable:
        return ItemFeatureTable(np.concatenate([self.gmf_item.weight.data, self.mlp_item.weight.data], axis=1))


def train_neumf(dataset: RatingDataset, config: NeuMFConfig) -> Tuple[NeuMF, List[float]]:
    """
    Fit NeuMF on the train partition with the squared loss.

    Raises:
        DomainError: The train partition is empty.
        TrainingError: The loss diverges; the message names the epoch.

    Returns:
        Tuple[NeuMF, List[float]]: The fitted model and its per-epoch training loss.
    """
    if not len(dataset.partition(data.TRAIN)):
        raise DomainError("NeuMF pretraining needs a non-empty train partition")
    rng = np.random.default_rng(config.seed)
    model = NeuMF(dataset.n_users, dataset.n_items, config.embedding_size, rng, dataset.train_mean)
    history = fit_pair_model(model, dataset, config.epochs, config.batch_size, config.learning_rate,
                             config.seed, MODULE_NAME)
    return model, history


def pretrain_neumf(dataset: RatingDataset, config: NeuMFConfig) -> ItemFeatureTable:
    """
    Item feature table of dimension 2k: GMF item embedding followed by MLP item embedding.
    """
    model, history = train_neumf(dataset, config)
    log(MODULE_NAME, f"Pretrained {dataset.n_items} item vectors of size {2 * config.embedding_size}, "
                     f"final loss {history[-1]:.6f}")
    return model.item_features()


def svd_item_features(dataset: RatingDataset, dim: int) -> ItemFeatureTable:
    """
    Item columns of a rank-`dim` factorization of the mean-centered train matrix, scaled by sqrt of the singular values.
    """
    users, items, ratings = dataset.pairs(data.TRAIN)
    if not len(ratings):
        raise DomainError("SVD features need a non-empty train partition")
    matrix = csr_matrix((ratings - dataset.train_mean, (users, items)),
                        shape=(dataset.n_users, dataset.n_items))
    rank = min(dim, min(matrix.shape) - 1)
    if rank >= 1:
        _, singular, vt = svds(matrix, k=rank, random_state=0)
    else:
        _, singular, vt = np.linalg.svd(matrix.toarray(), full_matrices=False)
        singular, vt = singular[:dim], vt[:dim]
    features = (vt.T * np.sqrt(singular))
    if features.shape[1] < dim:
        features = np.pad(features, ((0, 0), (0, dim - features.shape[1])))
    log(MODULE_NAME, f"SVD item features of rank {features.shape[1]}")
    return ItemFeatureTable(features)
