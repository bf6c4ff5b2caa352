from functools import cached_property
from pathlib import Path

import numpy as np

from dscf.exceptions import ValidationError


def cosine_similarity(a, b) -> float:
    """
    aᵀb / (|a||b|), clipped to [-1, 1]; 0 when either vector has zero norm.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    norm = np.linalg.norm(a) * np.linalg.norm(b)
    if norm == 0.0:
        return 0.0
    return float(np.clip(a @ b / norm, -1.0, 1.0))


class ItemFeatureTable:
    """
    One feature vector per item id, used only to rank items by cosine similarity.
    """

    def __init__(self, features):
        features = np.array(features, dtype=np.float64)
        if features.ndim != 2:
            raise ValidationError(f"item features must be a matrix, got shape {features.shape}")
        if not np.all(np.isfinite(features)):
            raise ValidationError("item features contain non-finite entries")
        features.flags.writeable = False
        self.features = features

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @cached_property
    def unit(self) -> np.ndarray:
        """
        Rows scaled to unit norm; zero rows stay zero so their similarity is 0.
        """
        norms = np.linalg.norm(self.features, axis=1, keepdims=True)
        unit = np.divide(self.features, norms, out=np.zeros_like(self.features), where=norms > 0)
        unit.flags.writeable = False
        return unit

    def similarities(self, candidates: np.ndarray, target: int) -> np.ndarray:
        """
        Cosine similarity of each candidate item to `target`; the target itself scores exactly 1.
        """
        sims = np.clip(self.unit[candidates] @ self.unit[target], -1.0, 1.0)
        if np.any(self.unit[target]):
            sims[candidates == target] = 1.0
        return sims

    def save(self, path) -> None:
        np.save(Path(path), self.features)

    @classmethod
    def load(cls, path) -> "ItemFeatureTable":
        return cls(np.load(Path(path)))
