from typing import Callable, Dict

import numpy as np

from dscf.nn.tensor import Parameter, Tensor


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """
    ||a - n|| / (||a|| + ||n||), zero when both gradients vanish.
    """
    diff = np.linalg.norm(analytic - numeric)
    scale = np.linalg.norm(analytic) + np.linalg.norm(numeric)
    if scale < 1e-12:
        return float(diff)
    return float(diff / scale)


def numeric_gradient(loss_fn: Callable[[], Tensor], parameter: Parameter, h: float = 1e-5) -> np.ndarray:
    """
    Central finite differences of `loss_fn` with respect to every entry of `parameter`.
    """
    grad = np.zeros_like(parameter.data)
    values = parameter.data
    for index in np.ndindex(values.shape):
        original = values[index]
        values[index] = original + h
        upper = loss_fn().item()
        values[index] = original - h
        lower = loss_fn().item()
        values[index] = original
        grad[index] = (upper - lower) / (2.0 * h)
    return grad


def gradient_check(loss_fn: Callable[[], Tensor], params: Dict[str, Parameter], h: float = 1e-5) -> Dict[str, float]:
    """
    Relative error between reverse-mode and finite-difference gradients, per parameter.

    `loss_fn` must be deterministic (dropout off) and rebuild the computation on each call.
    """
    for parameter in params.values():
        parameter.zero_grad()
    loss_fn().backward()
    analytic = {name: p.grad.copy() for name, p in params.items()}
    return {name: relative_error(analytic[name], numeric_gradient(loss_fn, p, h)) for name, p in params.items()}
