"""
Train/validation/test partition of a rating log and the resulting immutable dataset.
"""
import math
from functools import cached_property
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from dscf import data
from dscf.dataset.loader import RatingLog
from dscf.exceptions import ConfigurationError, ValidationError
from dscf.schema.schemas import DatasetStatistics
from dscf.utils.hash import hash_arrays
from dscf.utils.logger import log

MODULE_NAME = "split"

TRAIN_CODE, VAL_CODE, TEST_CODE = 0, 1, 2
PARTITION_CODES = {data.TRAIN: TRAIN_CODE, data.VAL: VAL_CODE, data.TEST: TEST_CODE}


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.flags.writeable = False
    return array


class RatingDataset:
    """
    Rating triples with dense ids and a per-triple partition label.

    Arrays are read-only after construction, so one instance can be shared
    across threads. Train-side lookups (items rated by a user, rating of a
    pair) are built lazily from the train partition only.
    """

    def __init__(self, users, items, ratings, labels, n_users: int, n_items: int, n_levels: int,
                 user_ids: Optional[np.ndarray] = None, item_ids: Optional[np.ndarray] = None):
        self.users = _readonly(np.asarray(users, dtype=np.int64))
        self.items = _readonly(np.asarray(items, dtype=np.int64))
        self.ratings = _readonly(np.asarray(ratings, dtype=np.int64))
        self.labels = _readonly(np.asarray(labels, dtype=np.uint8))
        self.n_users = int(n_users)
        self.n_items = int(n_items)
        self.n_levels = int(n_levels)
        self.user_ids = _readonly(user_ids if user_ids is not None else np.arange(n_users).astype(str))
        self.item_ids = _readonly(item_ids if item_ids is not None else np.arange(n_items).astype(str))

        if len(self.users) and (self.users.max() >= self.n_users or self.items.max() >= self.n_items):
            raise ValidationError("triple ids exceed the dataset id spaces")
        if len(self.ratings) and (self.ratings.min() < 1 or self.ratings.max() > self.n_levels):
            raise ValidationError(f"ratings must lie in [1, {self.n_levels}]")

    def __len__(self) -> int:
        return len(self.ratings)

    def partition(self, name: str) -> np.ndarray:
        """
        Indices of the triples labelled `name` (train, val or test).
        """
        return np.flatnonzero(self.labels == PARTITION_CODES[name])

    def pairs(self, name: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        index = self.partition(name)
        return self.users[index], self.items[index], self.ratings[index]

    @cached_property
    def _train_index(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        users, items, ratings = self.pairs(data.TRAIN)
        order = np.lexsort((items, users))
        users, items, ratings = users[order], items[order], ratings[order]
        indptr = np.zeros(self.n_users + 1, dtype=np.int64)
        np.add.at(indptr, users + 1, 1)
        np.cumsum(indptr, out=indptr)
        return indptr, items, ratings

    def train_items(self, user: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        Items rated by `user` in the train partition (ascending item id) and their ratings.
        """
        indptr, items, ratings = self._train_index
        start, stop = indptr[user], indptr[user + 1]
        return items[start:stop], ratings[start:stop]

    def train_rating(self, user: int, item: int) -> Optional[int]:
        items, ratings = self.train_items(user)
        position = np.searchsorted(items, item)
        if position < len(items) and items[position] == item:
            return int(ratings[position])
        return None

    @cached_property
    def train_mean(self) -> float:
        _, _, ratings = self.pairs(data.TRAIN)
        return float(ratings.mean()) if len(ratings) else 0.0

    def fingerprint(self) -> bytes:
        return hash_arrays(self.users, self.items, self.ratings, self.labels,
                           np.array([self.n_users, self.n_items, self.n_levels]))

    def statistics(self, n_social_connections: int = 0) -> DatasetStatistics:
        """
        Size and density figures, including the social network when its edge count is given.
        """
        cells = self.n_users * self.n_items
        pairs = self.n_users * self.n_users
        return DatasetStatistics(
            n_users=self.n_users,
            n_items=self.n_items,
            n_ratings=len(self),
            rating_density=len(self) / cells if cells else 0.0,
            n_social_connections=n_social_connections,
            social_density=n_social_connections / pairs if pairs else 0.0,
            partition_sizes={name: int(len(self.partition(name))) for name in data.PARTITIONS},
        )

    def save(self, path) -> None:
        np.savez_compressed(
            path, users=self.users, items=self.items, ratings=self.ratings, labels=self.labels,
            sizes=np.array([self.n_users, self.n_items, self.n_levels]),
            user_ids=self.user_ids, item_ids=self.item_ids)

    @classmethod
    def load(cls, path) -> "RatingDataset":
        with np.load(path, allow_pickle=False) as archive:
            n_users, n_items, n_levels = archive["sizes"].tolist()
            return cls(archive["users"], archive["items"], archive["ratings"], archive["labels"],
                       n_users, n_items, n_levels, archive["user_ids"], archive["item_ids"])


def partition_sizes(n: int, train_fraction: float) -> Tuple[int, int, int]:
    """
    Train gets round-half-up(x * n); validation gets half of the rest (floor); test the remainder.
    """
    n_train = min(n, int(math.floor(train_fraction * n + 0.5)))
    n_val = (n - n_train) // 2
    return n_train, n_val, n - n_train - n_val


def split_dataset(ratings: RatingLog, train_fraction: float, seed: int) -> RatingDataset:
    """
    Uniform random partition by triple, deterministic under `seed`.

    Args:
        ratings: Deduplicated rating log.
        train_fraction: Share x of triples used for training; validation and
            test each receive (1 - x) / 2.
        seed: Seed of the permutation.

    Raises:
        ConfigurationError: The fraction is outside (0, 1).

    Returns:
        RatingDataset: The labelled dataset.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ConfigurationError(f"train fraction {train_fraction} is outside (0, 1)")
    n = len(ratings)
    n_train, n_val, n_test = partition_sizes(n, train_fraction)
    order = np.random.default_rng(seed).permutation(n)
    labels = np.empty(n, dtype=np.uint8)
    labels[order[:n_train]] = TRAIN_CODE
    labels[order[n_train:n_train + n_val]] = VAL_CODE
    labels[order[n_train + n_val:]] = TEST_CODE
    log(MODULE_NAME, f"Split {n} triples into {n_train}/{n_val}/{n_test} with seed {seed}")
    return RatingDataset(ratings.users, ratings.items, ratings.ratings, labels,
                         ratings.n_users, ratings.n_items, ratings.n_levels,
                         ratings.user_ids.raw_ids, ratings.item_ids.raw_ids)


def write_split_manifest(dataset: RatingDataset, path, record_rows: Optional[np.ndarray] = None) -> None:
    """
    Sidecar listing one partition label per input record, in file order.

    `record_rows` maps each record to its retained triple (`RatingLog.record_rows`); a record
    overwritten by a later one of the same pair is labelled `dropped`. Without it every
    triple counts as one record.
    """
    rows = np.arange(len(dataset)) if record_rows is None else np.asarray(record_rows, dtype=np.int64)
    labels = np.array(data.PARTITIONS, dtype=object)[dataset.labels[rows]]
    labels[pd.Series(rows).duplicated(keep="last").to_numpy()] = data.DROPPED
    frame = pd.DataFrame({
        "user": dataset.user_ids[dataset.users[rows]],
        "item": dataset.item_ids[dataset.items[rows]],
        "label": labels,
    })
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"# n_users={dataset.n_users} n_items={dataset.n_items} n_ratings={len(dataset)}\n")
        frame.to_csv(handle, sep="\t", header=False, index=False)


def read_split_manifest(path) -> np.ndarray:
    frame = pd.read_csv(Path(path), sep="\t", header=None, comment="#", dtype=str,
                        names=["user", "item", "label"])
    frame = frame[frame["label"] != data.DROPPED]
    return frame["label"].map(PARTITION_CODES).to_numpy(dtype=np.uint8)
