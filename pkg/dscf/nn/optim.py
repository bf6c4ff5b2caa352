from typing import Dict

import numpy as np

from dscf import data
from dscf.exceptions import TrainingError
from dscf.nn.tensor import Parameter


class AdamState:
    """
    First and second moments per parameter plus the step count and hyper-parameters.
    """

    def __init__(self, params: Dict[str, Parameter], learning_rate: float = 0.001,
                 beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8):
        self.first_moment = {name: np.zeros_like(p.data) for name, p in params.items()}
        self.second_moment = {name: np.zeros_like(p.data) for name, p in params.items()}
        self.step_count = 0
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon


def adam_step(params: Dict[str, Parameter], state: AdamState) -> None:
    """
    One bias-corrected Adam update of every parameter, then clear the gradients.

    Raises:
        TrainingError: A gradient holds NaN or Inf; no parameter is touched.
    """
    for name, parameter in params.items():
        if not np.all(np.isfinite(parameter.grad)):
            raise TrainingError(data.MESSAGE_NON_FINITE_GRADIENT.format(name=name))

    state.step_count += 1
    t = state.step_count
    correction1 = 1.0 - state.beta1 ** t
    correction2 = 1.0 - state.beta2 ** t
    for name, parameter in params.items():
        grad = parameter.grad
        m = state.first_moment[name]
        v = state.second_moment[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * grad * grad
        m_hat = m / correction1
        v_hat = v / correction2
        parameter.data = parameter.data - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
        parameter.zero_grad()


class Adam:
    """
    Adaptive moment estimation over a named parameter set.
    """

    def __init__(self, params: Dict[str, Parameter], learning_rate: float = 0.001,
                 beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8):
        self.params = params
        self.state = AdamState(params, learning_rate, beta1, beta2, epsilon)

    def step(self) -> None:
        adam_step(self.params, self.state)

    def zero_grad(self) -> None:
        for parameter in self.params.values():
            parameter.zero_grad()
