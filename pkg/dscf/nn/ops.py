"""
Differentiable operations on `Tensor`.

Each op computes its numpy result and records a closure returning one
gradient per parent. Broadcasting ops reduce gradients back to the operand
shapes.
"""
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import expit

from dscf.exceptions import DimensionError, DomainError
from dscf.nn.tensor import Tensor, get_default_dtype

ArrayLike = Union[Tensor, np.ndarray, float, int]


def as_tensor(value: ArrayLike) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(np.asarray(value, dtype=get_default_dtype()))


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _broadcast_check(op: str, a: Tensor, b: Tensor) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise DimensionError(op, a.shape, b.shape) from None


def add(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_check("add", a, b)

    def backward(grad):
        return _unbroadcast(grad, a.shape), _unbroadcast(grad, b.shape)

    return Tensor(a.data + b.data, parents=(a, b), backward=backward)


def sub(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_check("sub", a, b)

    def backward(grad):
        return _unbroadcast(grad, a.shape), _unbroadcast(-grad, b.shape)

    return Tensor(a.data - b.data, parents=(a, b), backward=backward)


def mul(a: ArrayLike, b: ArrayLike) -> Tensor:
    """
    Elementwise product with broadcasting.
    """
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_check("mul", a, b)

    def backward(grad):
        return _unbroadcast(grad * b.data, a.shape), _unbroadcast(grad * a.data, b.shape)

    return Tensor(a.data * b.data, parents=(a, b), backward=backward)


def matmul(a: ArrayLike, b: ArrayLike) -> Tensor:
    """
    `a @ b` for `a` of any rank against a matrix or vector `b` shared by all leading dims.
    """
    a, b = as_tensor(a), as_tensor(b)
    if b.ndim not in (1, 2) or a.ndim < 1 or a.shape[-1] != b.shape[0]:
        raise DimensionError("matmul", a.shape, b.shape)

    if b.ndim == 1:
        def backward(grad):
            grad_a = grad[..., None] * b.data
            grad_b = (grad.reshape(-1, 1) * a.data.reshape(-1, a.shape[-1])).sum(axis=0)
            return grad_a, grad_b
    else:
        def backward(grad):
            grad_a = grad @ b.data.T
            grad_b = a.data.reshape(-1, a.shape[-1]).T @ grad.reshape(-1, b.shape[1])
            return grad_a, grad_b

    return Tensor(a.data @ b.data, parents=(a, b), backward=backward)


def concat(tensors: Sequence[ArrayLike], axis: int = -1) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    first = tensors[0]
    for other in tensors[1:]:
        if other.ndim != first.ndim or any(
                s != o for k, (s, o) in enumerate(zip(first.shape, other.shape)) if k != axis % first.ndim):
            raise DimensionError("concat", first.shape, other.shape)
    sizes = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(grad):
        return np.split(grad, sizes, axis=axis)

    return Tensor(np.concatenate([t.data for t in tensors], axis=axis), parents=tuple(tensors), backward=backward)


def stack(tensors: Sequence[ArrayLike], axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    for other in tensors[1:]:
        if other.shape != tensors[0].shape:
            raise DimensionError("stack", tensors[0].shape, other.shape)

    def backward(grad):
        return [np.take(grad, k, axis=axis) for k in range(len(tensors))]

    return Tensor(np.stack([t.data for t in tensors], axis=axis), parents=tuple(tensors), backward=backward)


def getitem(x: ArrayLike, key) -> Tensor:
    x = as_tensor(x)

    def backward(grad):
        full = np.zeros_like(x.data)
        np.add.at(full, key, grad)
        return (full,)

    return Tensor(x.data[key], parents=(x,), backward=backward)


def take(table: ArrayLike, indices) -> Tensor:
    """
    Row gather `table[indices]`; repeated indices sum their gradients.

    Raises:
        DomainError: An index is outside the table.
    """
    table = as_tensor(table)
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size and (indices.min() < 0 or indices.max() >= table.shape[0]):
        raise DomainError(f"index out of range for table with {table.shape[0]} rows")

    def backward(grad):
        full = np.zeros_like(table.data)
        np.add.at(full, indices, grad)
        return (full,)

    return Tensor(table.data[indices], parents=(table,), backward=backward)


def reshape(x: ArrayLike, shape) -> Tensor:
    x = as_tensor(x)

    def backward(grad):
        return (grad.reshape(x.shape),)

    return Tensor(x.data.reshape(shape), parents=(x,), backward=backward)


def flip(x: ArrayLike, axis: int) -> Tensor:
    x = as_tensor(x)

    def backward(grad):
        return (np.flip(grad, axis=axis),)

    return Tensor(np.flip(x.data, axis=axis).copy(), parents=(x,), backward=backward)


def relu(x: ArrayLike) -> Tensor:
    x = as_tensor(x)
    mask = x.data > 0

    def backward(grad):
        return (grad * mask,)

    return Tensor(x.data * mask, parents=(x,), backward=backward)


def tanh(x: ArrayLike) -> Tensor:
    x = as_tensor(x)
    out = np.tanh(x.data)

    def backward(grad):
        return (grad * (1.0 - out * out),)

    return Tensor(out, parents=(x,), backward=backward)


def sigmoid(x: ArrayLike) -> Tensor:
    x = as_tensor(x)
    out = expit(x.data)

    def backward(grad):
        return (grad * out * (1.0 - out),)

    return Tensor(out, parents=(x,), backward=backward)


def softmax(x: ArrayLike, axis: int = -1) -> Tensor:
    """
    Max-shifted softmax along `axis`.
    """
    x = as_tensor(x)
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    exp = np.exp(shifted)
    out = exp / exp.sum(axis=axis, keepdims=True)

    def backward(grad):
        return (out * (grad - (grad * out).sum(axis=axis, keepdims=True)),)

    return Tensor(out, parents=(x,), backward=backward)


def sum(x: ArrayLike, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    x = as_tensor(x)

    def backward(grad):
        if axis is not None and not keepdims:
            grad = np.expand_dims(grad, axis)
        return (np.broadcast_to(grad, x.shape).copy(),)

    return Tensor(np.sum(x.data, axis=axis, keepdims=keepdims), parents=(x,), backward=backward)


def mean(x: ArrayLike, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    x = as_tensor(x)
    count = x.data.size if axis is None else x.shape[axis]
    return mul(sum(x, axis=axis, keepdims=keepdims), 1.0 / count)


def square(x: ArrayLike) -> Tensor:
    x = as_tensor(x)

    def backward(grad):
        return (2.0 * grad * x.data,)

    return Tensor(x.data * x.data, parents=(x,), backward=backward)


def dropout(x: ArrayLike, rate: float, training: bool, rng: np.random.Generator) -> Tensor:
    """
    Inverted dropout: kept units are scaled by 1/(1-rate) in training; identity otherwise.

    Raises:
        DomainError: `rate` is outside [0, 1).
    """
    if not 0.0 <= rate < 1.0:
        raise DomainError(f"dropout rate {rate} is outside [0, 1)")
    x = as_tensor(x)
    if not training or rate == 0.0:
        return x
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return mul(x, mask.astype(x.data.dtype))
