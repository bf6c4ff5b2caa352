"""
Item-aware social sequences.

Each user visited by a random walk from the target user u is replaced by the
train interaction of that user whose item is most similar to the target item
v. Users without train interactions, and the stalled tail of a padded walk,
become the padding step (n_users, n_items, 0).
"""
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from dscf import data
from dscf.config import settings
from dscf.dataset.split import RatingDataset
from dscf.exceptions import DomainError, MissingSequenceError
from dscf.features.similarity import ItemFeatureTable
from dscf.graph.social import SocialGraph
from dscf.graph.walks import DEFAULT_POLICY, TransitionPolicy, random_walk
from dscf.schema.schemas import ItemAwareSequence, UserSequence
from dscf.utils.logger import log
from dscf.utils.rng import make_rng

MODULE_NAME = "sequences"

Step = Tuple[int, int, int]


def padding_step(dataset: RatingDataset) -> Step:
    return dataset.n_users, dataset.n_items, 0


def select_relevant_item(neighbor: int, target_item: int, dataset: RatingDataset, features: ItemFeatureTable,
                         exclude_item: Optional[int] = None) -> Optional[Tuple[int, int]]:
    """
    The neighbor's train item most similar to `target_item`, with its rating.

    Items come sorted by id, so the first maximum is the smallest id among ties.
    The target item itself always wins when the neighbor rated it.

    Args:
        neighbor: User whose train interactions are searched.
        target_item: Item the similarity is measured against.
        dataset: Dataset holding the train partition.
        features: Item feature table covering every item.
        exclude_item: Item that must not be chosen.

    Returns:
        Optional[Tuple[int, int]]: (item, rating), or None without candidate interactions.
    """
    items, ratings = dataset.train_items(neighbor)
    if exclude_item is not None:
        keep = items != exclude_item
        items, ratings = items[keep], ratings[keep]
    if not len(items):
        return None
    best = int(np.argmax(features.similarities(items, target_item)))
    return int(items[best]), int(ratings[best])


def item_aware_steps(walk: UserSequence, target_user: int, target_item: int, dataset: RatingDataset,
                     features: ItemFeatureTable, memo: Optional[Dict[Tuple[int, int], Optional[Tuple[int, int]]]] = None
                     ) -> ItemAwareSequence:
    """
    Convert one user walk into (neighbor, item, rating) steps for the pair (target_user, target_item).

    A step that revisits the target user never selects the target item, so a
    train pair cannot read its own rating from its sequences.
    """
    pad = padding_step(dataset)
    steps: List[Step] = []
    for position, neighbor in enumerate(walk.steps):
        if walk.padded and position >= walk.padded_from:
            steps.append(pad)
            continue
        if neighbor == target_user:
            choice = select_relevant_item(neighbor, target_item, dataset, features, exclude_item=target_item)
        elif memo is not None:
            key = (neighbor, target_item)
            if key not in memo:
                memo[key] = select_relevant_item(neighbor, target_item, dataset, features)
            choice = memo[key]
        else:
            choice = select_relevant_item(neighbor, target_item, dataset, features)
        steps.append(pad if choice is None else (neighbor, choice[0], choice[1]))
    return ItemAwareSequence(target_user=target_user, target_item=target_item, steps=steps,
                             padded=any(step == pad for step in steps))


def build_item_aware_sequences(target_user: int, target_item: int, graph: SocialGraph, dataset: RatingDataset,
                               features: ItemFeatureTable, length: int, count: int, seed: int,
                               policy: TransitionPolicy = DEFAULT_POLICY, memo=None) -> List[ItemAwareSequence]:
    """
    `count` independent walks of `length` steps from `target_user`, each turned item-aware.

    The walk stream is seeded by (seed, target_user, target_item), so the
    result does not depend on the order pairs are processed in.

    Raises:
        DomainError: `length` or `count` below 1.
    """
    if length < 1 or count < 1:
        raise DomainError(f"sequence length and count must be at least 1, got l={length}, H={count}")
    rng = make_rng(seed, target_user, target_item)
    return [item_aware_steps(random_walk(graph, target_user, length, rng, policy),
                             target_user, target_item, dataset, features, memo)
            for _ in range(count)]


class SequenceStore:
    """
    Item-aware sequences of many pairs as one integer array of shape (pairs, H, l, 3).
    """

    def __init__(self, users, items, steps: np.ndarray, length: int, count: int, seed: int):
        self.users = np.asarray(users, dtype=np.int64)
        self.items = np.asarray(items, dtype=np.int64)
        self.steps = np.asarray(steps, dtype=np.int64).reshape(len(self.users), count, length, 3)
        self.length = length
        self.count = count
        self.seed = seed
        self._index = {(u, v): row for row, (u, v) in enumerate(zip(self.users.tolist(), self.items.tolist()))}

    def __len__(self) -> int:
        return len(self.users)

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self._index

    def get(self, users, items) -> np.ndarray:
        """
        Steps of each requested pair, shape (batch, H, l, 3).

        Raises:
            MissingSequenceError: A pair has no cached sequences.
        """
        rows = []
        for u, v in zip(np.asarray(users).tolist(), np.asarray(items).tolist()):
            row = self._index.get((u, v))
            if row is None:
                raise MissingSequenceError(u, v)
            rows.append(row)
        return self.steps[rows]

    def merge(self, other: "SequenceStore") -> "SequenceStore":
        """
        Pairs of both stores; entries of `other` win on overlap.
        """
        if (other.length, other.count) != (self.length, self.count):
            raise DomainError("cannot merge sequence stores of different shapes")
        keep = np.array([(u, v) not in other for u, v in zip(self.users.tolist(), self.items.tolist())], dtype=bool)
        return SequenceStore(np.concatenate([self.users[keep], other.users]),
                             np.concatenate([self.items[keep], other.items]),
                             np.concatenate([self.steps[keep], other.steps]),
                             self.length, self.count, other.seed)


def build_sequence_store(users: Iterable[int], items: Iterable[int], graph: SocialGraph, dataset: RatingDataset,
                         features: ItemFeatureTable, length: int, count: int, seed: int,
                         policy: TransitionPolicy = DEFAULT_POLICY) -> SequenceStore:
    """
    Sequences for every distinct (user, item) pair given.
    """
    pairs = sorted(set(zip(np.asarray(users).tolist(), np.asarray(items).tolist())))
    steps = np.empty((len(pairs), count, length, 3), dtype=np.int64)
    memo = {}
    padded = 0
    for row, (user, item) in enumerate(tqdm(pairs, desc=MODULE_NAME, disable=not settings.progress, leave=False)):
        built = build_item_aware_sequences(user, item, graph, dataset, features, length, count, seed, policy, memo)
        steps[row] = [sequence.steps for sequence in built]
        padded += sum(sequence.padded for sequence in built)
    log(MODULE_NAME, f"Built {len(pairs)} x {count} sequences of length {length}, {padded} with padding")
    pair_array = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    return SequenceStore(pair_array[:, 0], pair_array[:, 1], steps, length, count, seed)


def audit_leakage(store: SequenceStore, dataset: RatingDataset) -> int:
    """
    Number of non-padding steps that are not a train interaction with its train rating.
    """
    users, items, ratings = dataset.pairs(data.TRAIN)
    keys = users * max(dataset.n_items, 1) + items
    order = np.argsort(keys)
    keys, ratings = keys[order], ratings[order]

    flat = store.steps.reshape(-1, 3)
    flat = flat[flat[:, 2] != 0]
    if not len(flat):
        return 0
    if not len(keys):
        return int(len(flat))
    wanted = flat[:, 0] * max(dataset.n_items, 1) + flat[:, 1]
    position = np.minimum(np.searchsorted(keys, wanted), len(keys) - 1)
    found = (keys[position] == wanted) & (ratings[position] == flat[:, 2])
    return int((~found).sum())
