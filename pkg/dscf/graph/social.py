from typing import Iterable, Union

import numpy as np

from dscf.dataset.loader import TrustNetwork
from dscf.exceptions import DomainError
from dscf.schema.schemas import DegreeStatistics, TrustEdge
from dscf.utils.logger import log

MODULE_NAME = "graph"


class SocialGraph:
    """
    Social network over users as sorted, duplicate-free neighbor lists (CSR layout).

    Immutable after construction; walks may be drawn from it concurrently.
    """

    def __init__(self, n_users: int, indptr: np.ndarray, indices: np.ndarray, directed: bool = False):
        self.n_users = int(n_users)
        self.indptr = indptr
        self.indices = indices
        self.directed = directed
        self.indptr.flags.writeable = False
        self.indices.flags.writeable = False

    def neighbors(self, user: int) -> np.ndarray:
        if not 0 <= user < self.n_users:
            raise DomainError(f"user {user} is outside 0..{self.n_users - 1}")
        return self.indices[self.indptr[user]:self.indptr[user + 1]]

    def degree(self, user: int) -> int:
        return int(self.indptr[user + 1] - self.indptr[user])

    def has_edge(self, source: int, target: int) -> bool:
        row = self.neighbors(source)
        position = np.searchsorted(row, target)
        return bool(position < len(row) and row[position] == target)

    @property
    def n_edges(self) -> int:
        return len(self.indices)

    def degree_statistics(self) -> DegreeStatistics:
        degrees = np.diff(self.indptr)
        if not len(degrees):
            return DegreeStatistics(min_degree=0, max_degree=0, mean_degree=0.0, isolated_users=0)
        return DegreeStatistics(
            min_degree=int(degrees.min()),
            max_degree=int(degrees.max()),
            mean_degree=float(degrees.mean()),
            isolated_users=int((degrees == 0).sum()),
        )


def build_graph(edges: Union[TrustNetwork, Iterable[TrustEdge]], n_users: int, directed: bool = False) -> SocialGraph:
    """
    Build the adjacency of the trust network.

    Args:
        edges: Trust edges, as a loaded network or any iterable of `TrustEdge`.
        n_users: Size of the user id space.
        directed: Keep edge direction; by default every edge is walked both ways.

    Raises:
        DomainError: An endpoint is outside 0..n_users-1.

    Returns:
        SocialGraph: Deduplicated adjacency without self-loops.
    """
    if isinstance(edges, TrustNetwork):
        sources, targets = edges.sources, edges.targets
    else:
        pairs = [(e.source, e.target) for e in edges]
        sources = np.array([p[0] for p in pairs], dtype=np.int64)
        targets = np.array([p[1] for p in pairs], dtype=np.int64)
    sources = np.asarray(sources, dtype=np.int64)
    targets = np.asarray(targets, dtype=np.int64)
    if len(sources) and (min(sources.min(), targets.min()) < 0 or max(sources.max(), targets.max()) >= n_users):
        raise DomainError(f"trust edge endpoint outside 0..{n_users - 1}")

    if not directed:
        sources, targets = np.concatenate([sources, targets]), np.concatenate([targets, sources])
    keep = sources != targets
    sources, targets = sources[keep], targets[keep]

    # unique on the packed (source, target) key sorts rows and neighbors at once
    keys = np.unique(sources * max(n_users, 1) + targets)
    sources, targets = keys // max(n_users, 1), keys % max(n_users, 1)
    indptr = np.zeros(n_users + 1, dtype=np.int64)
    np.add.at(indptr, sources + 1, 1)
    np.cumsum(indptr, out=indptr)

    graph = SocialGraph(n_users, indptr, targets.astype(np.int64), directed)
    log(MODULE_NAME, f"Built {'directed' if directed else 'undirected'} graph: "
                     f"{graph.n_edges} adjacency entries, {graph.degree_statistics().json()}")
    return graph
