from typing import Tuple

import numpy as np

from dscf.exceptions import DimensionError, DomainError
from dscf.nn import ops
from dscf.nn.tensor import Tensor


def _check(predictions: np.ndarray, targets: np.ndarray) -> None:
    if predictions.shape != targets.shape:
        raise DimensionError("metric", predictions.shape, targets.shape)
    if predictions.size == 0:
        raise DomainError("metrics need at least one prediction")


def loss_mse(predictions, targets) -> float:
    """
    Halved mean squared error, (1 / 2|O|) * sum (r' - r)^2.

    Raises:
        DomainError: Empty input.
    """
    predictions = np.asarray(predictions, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    _check(predictions, targets)
    return float(0.5 * np.mean((predictions - targets) ** 2))


def squared_loss(predictions: Tensor, targets) -> Tensor:
    """
    Differentiable counterpart of `loss_mse` for training.
    """
    targets = np.asarray(targets, dtype=predictions.data.dtype)
    _check(predictions.data, targets)
    return ops.mul(ops.mean(ops.square(ops.sub(predictions, targets))), 0.5)


def error_metrics(predictions, targets) -> Tuple[float, float]:
    """
    MAE and RMSE of predictions against targets.
    """
    predictions = np.asarray(predictions, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    _check(predictions, targets)
    errors = predictions - targets
    mae = float(np.mean(np.abs(errors)))
    rmse = float(np.sqrt(np.mean(errors ** 2)))
    return mae, rmse


def clamp_ratings(predictions, n_levels: int) -> np.ndarray:
    return np.clip(np.asarray(predictions, dtype=np.float64), 1.0, float(n_levels))
