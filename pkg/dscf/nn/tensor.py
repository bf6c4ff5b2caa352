"""
Reverse-mode differentiation over numpy arrays.

Every operation in `dscf.nn.ops` returns a `Tensor` that remembers its parents
and a closure mapping the output gradient to one gradient per parent.
`Tensor.backward()` walks that record in reverse topological order and sums
the contributions of every use into each `Parameter.grad`.
"""
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from dscf.exceptions import StateError

_DTYPES = {"float64": np.float64, "float32": np.float32}
_default_dtype = np.float64


def set_default_dtype(name: str) -> None:
    global _default_dtype
    _default_dtype = _DTYPES[name]


def get_default_dtype():
    return _default_dtype


BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Tensor:
    """
    An array node of the computation record.
    """

    def __init__(self, data, requires_grad: bool = False, parents: Tuple["Tensor", ...] = (),
                 backward: Optional[BackwardFn] = None, name: Optional[str] = None):
        self.data = np.asarray(data, dtype=_default_dtype) if not isinstance(data, np.ndarray) \
            or data.dtype.kind != "f" else data
        self.requires_grad = requires_grad or any(p.requires_grad for p in parents)
        self._parents = parents if self.requires_grad else ()
        self._backward = backward if self.requires_grad else None
        self.name = name
        self.grad: Optional[np.ndarray] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def item(self) -> float:
        return float(self.data)

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{label})"

    def __add__(self, other):
        from dscf.nn import ops
        return ops.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        from dscf.nn import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from dscf.nn import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from dscf.nn import ops
        return ops.mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        from dscf.nn import ops
        return ops.mul(self, -1.0)

    def __matmul__(self, other):
        from dscf.nn import ops
        return ops.matmul(self, other)

    def __getitem__(self, key):
        from dscf.nn import ops
        return ops.getitem(self, key)

    def backward(self) -> None:
        """
        Populate `grad` of every parameter reachable from this scalar.

        Raises:
            StateError: The tensor is not a scalar produced by recorded
                operations, or its record was already consumed.
        """
        if self.data.size != 1:
            raise StateError(f"backward needs a scalar loss, got shape {self.shape}")
        if not self.requires_grad:
            raise StateError("backward called before any recorded forward computation")
        if self._backward is None and self._parents == () and not isinstance(self, Parameter):
            raise StateError("computation record already consumed by a previous backward")

        order, seen, stack = [], set(), [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in seen:
                    stack.append((parent, False))

        grads = {id(self): np.ones_like(self.data)}
        for node in reversed(order):
            grad = grads.pop(id(node), None)
            if grad is None:
                continue
            if isinstance(node, Parameter):
                node.grad = grad if node.grad is None else node.grad + grad
            if node._backward is not None:
                for parent, parent_grad in zip(node._parents, node._backward(grad)):
                    if parent_grad is None or not parent.requires_grad:
                        continue
                    key = id(parent)
                    grads[key] = parent_grad if key not in grads else grads[key] + parent_grad
            if not isinstance(node, Parameter):
                node._parents = ()
                node._backward = None


class Parameter(Tensor):
    """
    A learnable array: values, a same-shape gradient and a name.
    """

    def __init__(self, data, name: Optional[str] = None):
        super().__init__(np.array(data, dtype=_default_dtype), requires_grad=True, name=name)
        self.grad = np.zeros_like(self.data)

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)

    def assign(self, values) -> None:
        values = np.asarray(values, dtype=self.data.dtype)
        if values.shape != self.data.shape:
            from dscf.exceptions import DimensionError
            raise DimensionError(f"assign {self.name}", self.data.shape, values.shape)
        self.data = values.copy()
