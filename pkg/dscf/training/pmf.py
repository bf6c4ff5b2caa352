"""
Probabilistic matrix factorization baseline.

r' = mu + b_u + b_i + U_u . V_i, trained on the squared error with Gaussian
priors on the factors, i.e. an L2 penalty (reg / 2)(|U_u|^2 + |V_i|^2) per
observed pair. Biases are not penalized.
"""
import numpy as np

from dscf.nn import ops
from dscf.nn.layers import Embedding
from dscf.nn.tensor import Parameter, get_default_dtype
from dscf.training.pairwise import PairModel

INIT_STD = 0.1


class PMF(PairModel):

    def __init__(self, n_users: int, n_items: int, rank: int, reg: float, rng: np.random.Generator,
                 offset: float = 0.0):
        super().__init__()
        object.__setattr__(self, "reg", float(reg))
        object.__setattr__(self, "offset", float(offset))
        self.user_factors = Embedding(n_users, rank, rng)
        self.item_factors = Embedding(n_items, rank, rng)
        self.user_factors.weight.assign(rng.normal(0.0, INIT_STD, (n_users, rank)))
        self.item_factors.weight.assign(rng.normal(0.0, INIT_STD, (n_items, rank)))
        self.user_bias = Parameter(np.zeros(n_users, dtype=get_default_dtype()))
        self.item_bias = Parameter(np.zeros(n_items, dtype=get_default_dtype()))

    def __call__(self, users, items):
        dot = ops.sum(ops.mul(self.user_factors(users), self.item_factors(items)), axis=-1)
        biases = ops.add(ops.take(self.user_bias, users), ops.take(self.item_bias, items))
        return ops.add(ops.add(dot, biases), self.offset)

    def penalty(self, users, items):
        if self.reg == 0.0:
            return None
        norms = ops.add(ops.sum(ops.square(self.user_factors(users)), axis=-1),
                        ops.sum(ops.square(self.item_factors(items)), axis=-1))
        return ops.mul(ops.mean(norms), 0.5 * self.reg)
