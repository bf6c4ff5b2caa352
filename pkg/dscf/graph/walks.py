"""
Fixed-length random walks over the social graph.

A walk rooted at u starts at one of u's neighbors; u itself is not an element
of the sequence. The next step is drawn by a transition policy, uniform over
the current user's neighbors by default. When the current user has no
neighbors the remaining steps repeat the last visited user and the sequence is
flagged as padded; an isolated root yields a sequence of the root itself.
"""
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from dscf.exceptions import DomainError
from dscf.graph.social import SocialGraph
from dscf.schema.schemas import UserSequence


class TransitionPolicy:
    """
    Chooses the next user of a walk among the neighbors of the current one.
    """

    def choose(self, graph: SocialGraph, previous: Optional[int], current: int,
               neighbors: np.ndarray, rng: np.random.Generator) -> int:
        raise NotImplementedError


class UniformPolicy(TransitionPolicy):

    def choose(self, graph, previous, current, neighbors, rng):
        return int(neighbors[rng.integers(len(neighbors))])


class Node2VecPolicy(TransitionPolicy):
    """
    Second-order biased walk: return parameter p, in-out parameter q.
    """

    def __init__(self, p: float = 1.0, q: float = 1.0):
        if p <= 0 or q <= 0:
            raise DomainError("node2vec parameters p and q must be positive")
        self.p = p
        self.q = q

    def choose(self, graph, previous, current, neighbors, rng):
        if previous is None:
            return int(neighbors[rng.integers(len(neighbors))])
        weights = np.empty(len(neighbors))
        for k, candidate in enumerate(neighbors.tolist()):
            if candidate == previous:
                weights[k] = 1.0 / self.p
            elif graph.has_edge(candidate, previous):
                weights[k] = 1.0
            else:
                weights[k] = 1.0 / self.q
        return int(rng.choice(neighbors, p=weights / weights.sum()))


DEFAULT_POLICY = UniformPolicy()


def random_walk(graph: SocialGraph, root: int, length: int, rng: np.random.Generator,
                policy: TransitionPolicy = DEFAULT_POLICY) -> UserSequence:
    """
    Draw one walk of exactly `length` steps rooted at `root`.

    Raises:
        DomainError: `root` is outside the graph or `length` < 1.
    """
    if length < 1:
        raise DomainError(f"walk length must be at least 1, got {length}")
    if not 0 <= root < graph.n_users:
        raise DomainError(f"root {root} is outside 0..{graph.n_users - 1}")

    steps = []
    previous, current = None, root
    padded_from = None
    while len(steps) < length:
        neighbors = graph.neighbors(current)
        if not len(neighbors):
            padded_from = len(steps)
            steps.extend([current] * (length - len(steps)))
            break
        previous, current = current, policy.choose(graph, previous, current, neighbors, rng)
        steps.append(current)
    return UserSequence(root=root, steps=tuple(steps), padded=padded_from is not None, padded_from=padded_from)


def dump_walk_corpus(path, walks: Iterable[UserSequence], seed: int, length: int) -> None:
    """
    One walk per line, space-separated user ids, after a header comment with seed and length.
    """
    with open(Path(path), "w", encoding="utf-8") as handle:
        handle.write(f"# seed={seed} length={length}\n")
        for walk in walks:
            handle.write(" ".join(str(step) for step in walk.steps) + "\n")
