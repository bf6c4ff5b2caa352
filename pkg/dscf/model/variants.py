from typing import Union

import numpy as np
from pydantic import BaseModel

from dscf import data
from dscf.exceptions import ConfigurationError
from dscf.schema.schemas import VariantKind
from dscf.utils.rng import make_rng


class VariantConfig(BaseModel):
    """
    Which components of the network are active.

    use_rating / use_item: rating and item embeddings enter the fusion MLP.
    recurrent: steps are read by the Bi-LSTM; otherwise h_k = [e_k, e_k] and steps are averaged.
    attention: learned step (alpha) and sequence (beta) weights; otherwise uniform means.
    shuffle: step order of every sequence is permuted before encoding.
    """
    kind: VariantKind
    use_rating: bool = True
    use_item: bool = True
    recurrent: bool = True
    attention: bool = True
    shuffle: bool = False

    class Config:
        frozen = True


_VARIANTS = {
    VariantKind.FULL: {},
    VariantKind.NO_OPINION: {"use_rating": False},
    VariantKind.NO_ITEM_OPINION: {"use_rating": False, "use_item": False},
    VariantKind.NO_ATTENTION: {"attention": False},
    VariantKind.AVERAGING: {"recurrent": False},
    VariantKind.SHUFFLING: {"shuffle": True},
}


def make_variant(kind: Union[str, VariantKind]) -> VariantConfig:
    """
    Model configuration of the full network or one of its ablations.

    Raises:
        ConfigurationError: `kind` names no known variant.
    """
    try:
        kind = VariantKind(kind)
    except ValueError:
        raise ConfigurationError(data.MESSAGE_UNKNOWN_VARIANT.format(
            kind=kind, kinds=", ".join(k.value for k in VariantKind))) from None
    return VariantConfig(kind=kind, **_VARIANTS[kind])


def shuffle_steps(steps: np.ndarray, users: np.ndarray, items: np.ndarray, seed: int) -> np.ndarray:
    """
    Permute the steps of every sequence, seeded by (seed, user, item, sequence index).
    """
    shuffled = steps.copy()
    length = steps.shape[2]
    for b, (user, item) in enumerate(zip(np.asarray(users).tolist(), np.asarray(items).tolist())):
        for h in range(steps.shape[1]):
            shuffled[b, h] = steps[b, h, make_rng(seed, user, item, h).permutation(length)]
    return shuffled
