from collections import OrderedDict
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from dscf.nn import ops
from dscf.nn.tensor import Parameter, Tensor, get_default_dtype

EMBEDDING_INIT_SCALE = 0.1
FORGET_GATE_BIAS = 1.0


def uniform(rng: np.random.Generator, shape, bound: float) -> np.ndarray:
    return rng.uniform(-bound, bound, size=shape).astype(get_default_dtype())


class Module:
    """
    Container of named parameters and sub-modules with a train/eval switch.

    Attributes holding a `Parameter` or a `Module` are registered in
    assignment order, which fixes the parameter manifest order.
    """

    def __init__(self):
        object.__setattr__(self, "_parameters", OrderedDict())
        object.__setattr__(self, "_modules", OrderedDict())
        object.__setattr__(self, "training", True)

    def __setattr__(self, name, value):
        if isinstance(value, Parameter):
            self._parameters[name] = value
        elif isinstance(value, Module):
            self._modules[name] = value
        object.__setattr__(self, name, value)

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Parameter]]:
        for name, parameter in self._parameters.items():
            yield prefix + name, parameter
        for name, module in self._modules.items():
            yield from module.named_parameters(prefix + name + ".")

    def parameters(self) -> Dict[str, Parameter]:
        params = OrderedDict(self.named_parameters())
        for name, parameter in params.items():
            parameter.name = name
        return params

    def train(self, mode: bool = True) -> "Module":
        object.__setattr__(self, "training", mode)
        for module in self._modules.values():
            module.train(mode)
        return self

    def eval(self) -> "Module":
        return self.train(False)

    def state_dict(self) -> Dict[str, np.ndarray]:
        return OrderedDict((name, p.data.copy()) for name, p in self.parameters().items())

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        params = self.parameters()
        missing = set(params) - set(state)
        if missing:
            raise KeyError(f"state is missing parameters {sorted(missing)}")
        for name, parameter in params.items():
            parameter.assign(state[name])


class Embedding(Module):
    """
    Lookup table, rows initialized uniform in [-0.1, 0.1].
    """

    def __init__(self, n_rows: int, dim: int, rng: np.random.Generator):
        super().__init__()
        self.weight = Parameter(uniform(rng, (n_rows, dim), EMBEDDING_INIT_SCALE))

    def __call__(self, indices) -> Tensor:
        return ops.take(self.weight, indices)


class Linear(Module):
    """
    Affine map `x @ W + b`; W uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], b zero.
    """

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator):
        super().__init__()
        self.weight = Parameter(uniform(rng, (in_dim, out_dim), 1.0 / np.sqrt(in_dim)))
        self.bias = Parameter(np.zeros(out_dim))

    def __call__(self, x) -> Tensor:
        return ops.add(ops.matmul(x, self.weight), self.bias)


class MLP(Module):
    """
    `n_hidden` ReLU layers of width `hidden_dim`, dropout after each, then a linear output layer.
    """

    def __init__(self, in_dim: int, hidden_dim: int, out_dim: int, rng: np.random.Generator,
                 n_hidden: int = 3, dropout: float = 0.0, dropout_rng: Optional[np.random.Generator] = None):
        super().__init__()
        self.dropout = dropout
        object.__setattr__(self, "dropout_rng", dropout_rng or rng)
        object.__setattr__(self, "n_hidden", n_hidden)
        dims = [in_dim] + [hidden_dim] * n_hidden
        for k in range(n_hidden):
            setattr(self, f"hidden{k}", Linear(dims[k], dims[k + 1], rng))
        self.output = Linear(dims[-1], out_dim, rng)

    def __call__(self, x) -> Tensor:
        for k in range(self.n_hidden):
            x = ops.relu(getattr(self, f"hidden{k}")(x))
            x = ops.dropout(x, self.dropout, self.training, self.dropout_rng)
        return self.output(x)


class LSTM(Module):
    """
    Single-direction LSTM over the middle axis of a (batch, steps, features) input.

    Gates are packed as [input, forget, output, candidate] in one weight matrix
    acting on the concatenation [x_t, h_{t-1}]; the forget-gate bias starts at 1.
    """

    def __init__(self, in_dim: int, hidden_dim: int, rng: np.random.Generator):
        super().__init__()
        object.__setattr__(self, "hidden_dim", hidden_dim)
        bound = 1.0 / np.sqrt(in_dim + hidden_dim)
        self.weight = Parameter(uniform(rng, (in_dim + hidden_dim, 4 * hidden_dim), bound))
        bias = np.zeros(4 * hidden_dim)
        bias[hidden_dim:2 * hidden_dim] = FORGET_GATE_BIAS
        self.bias = Parameter(bias)

    def __call__(self, x: Tensor, reverse: bool = False) -> Tensor:
        """
        Hidden states aligned with the input steps: output[:, k] is the state after reading step k.
        """
        batch, steps = x.shape[0], x.shape[1]
        h_dim = self.hidden_dim
        h = Tensor(np.zeros((batch, h_dim), dtype=x.data.dtype))
        c = Tensor(np.zeros((batch, h_dim), dtype=x.data.dtype))
        outputs = [None] * steps
        order = range(steps - 1, -1, -1) if reverse else range(steps)
        for k in order:
            gates = ops.add(ops.matmul(ops.concat([x[:, k], h], axis=-1), self.weight), self.bias)
            input_gate = ops.sigmoid(gates[:, :h_dim])
            forget_gate = ops.sigmoid(gates[:, h_dim:2 * h_dim])
            output_gate = ops.sigmoid(gates[:, 2 * h_dim:3 * h_dim])
            candidate = ops.tanh(gates[:, 3 * h_dim:])
            c = ops.add(ops.mul(forget_gate, c), ops.mul(input_gate, candidate))
            h = ops.mul(output_gate, ops.tanh(c))
            outputs[k] = h
        return ops.stack(outputs, axis=1)
