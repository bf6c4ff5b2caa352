"""
Training loop shared by the models that score a (user, item) pair from ids alone
(NeuMF, PMF).
"""
from typing import List, Optional

import numpy as np
from tqdm import tqdm

from dscf import data
from dscf.config import settings
from dscf.dataset.split import RatingDataset
from dscf.exceptions import DomainError, TrainingError
from dscf.nn import ops
from dscf.nn.layers import Module
from dscf.nn.optim import Adam
from dscf.nn.tensor import Tensor
from dscf.training.metrics import squared_loss
from dscf.utils.logger import log


class PairModel(Module):

    def __call__(self, users: np.ndarray, items: np.ndarray) -> Tensor:
        raise NotImplementedError

    def penalty(self, users: np.ndarray, items: np.ndarray) -> Optional[Tensor]:
        return None


def fit_pair_model(model: PairModel, dataset: RatingDataset, epochs: int, batch_size: int,
                   learning_rate: float, seed: int, module: str) -> List[float]:
    """
    Minimise the halved squared error (plus the model's penalty) on the train partition with Adam.

    Raises:
        DomainError: The train partition is empty.
        TrainingError: The loss becomes non-finite.

    Returns:
        List[float]: Mean training loss of every epoch.
    """
    users, items, ratings = dataset.pairs(data.TRAIN)
    if not len(ratings):
        raise DomainError("train partition is empty")
    rng = np.random.default_rng(seed)
    optimizer = Adam(model.parameters(), learning_rate=learning_rate)
    history = []

    for epoch in tqdm(range(1, epochs + 1), desc=module, disable=not settings.progress, leave=False):
        model.train()
        order = rng.permutation(len(ratings))
        total = 0.0
        for batch, start in enumerate(range(0, len(order), batch_size)):
            index = order[start:start + batch_size]
            loss = squared_loss(model(users[index], items[index]), ratings[index])
            penalty = model.penalty(users[index], items[index])
            if penalty is not None:
                loss = ops.add(loss, penalty)
            if not np.isfinite(loss.item()):
                raise TrainingError(data.MESSAGE_NON_FINITE_LOSS.format(epoch=epoch, batch=batch))
            loss.backward()
            optimizer.step()
            total += loss.item() * len(index)
        history.append(total / len(ratings))
        if epoch == 1 or epoch % 10 == 0 or epoch == epochs:
            log(module, f"epoch {epoch}: train loss {history[-1]:.6f}")
    return history


def predict_pairs(model: PairModel, users: np.ndarray, items: np.ndarray, batch_size: int = 4096) -> np.ndarray:
    model.eval()
    chunks = [model(users[s:s + batch_size], items[s:s + batch_size]).data
              for s in range(0, len(users), batch_size)]
    return np.concatenate(chunks) if chunks else np.zeros(0)
