import numpy as np
import pytest

from dscf.dataset.loader import IdMap, RatingLog, remap_trust
from dscf.dataset.split import TEST_CODE, TRAIN_CODE, RatingDataset, split_dataset
from dscf.dataset.synthetic import generate_homophily_dataset
from dscf.features.similarity import ItemFeatureTable
from dscf.graph.social import build_graph
from dscf.nn import ops
from dscf.nn.tensor import set_default_dtype
from dscf.schema.schemas import TrainConfig


@pytest.fixture(autouse=True)
def float64():
    set_default_dtype("float64")
    yield
    set_default_dtype("float64")


@pytest.fixture
def running_example():
    """
    Seven users and six items shaped after the running example: u0 is the
    target user, the target item is v2, and u2 rated v4 (assumed most similar
    to v2) with rating 2.
    """
    triples = [
        (0, 0, 4), (0, 1, 3),
        (1, 2, 5), (1, 0, 2),
        (2, 4, 2), (2, 5, 4),
        (3, 1, 1),
        (4, 0, 5),
        (5, 4, 3), (5, 3, 1),
        (6, 2, 4),
        (0, 2, 5),
    ]
    users, items, ratings = (np.array(column) for column in zip(*triples))
    labels = np.full(len(triples), TRAIN_CODE, dtype=np.uint8)
    labels[-1] = TEST_CODE
    dataset = RatingDataset(users, items, ratings, labels, n_users=7, n_items=6, n_levels=5)
    features = ItemFeatureTable(np.array([
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.6, 0.8, 0.0],
        [0.0, 0.0, 1.0],
        [0.5, 0.8, 0.1],
        [-0.6, -0.8, 0.0],
    ]))
    edges = [(0, 1), (1, 2), (2, 5), (5, 6), (0, 3), (3, 4)]
    graph = build_graph(remap_trust([str(s) for s, _ in edges], [str(t) for _, t in edges],
                                    IdMap(raw_ids=np.arange(7).astype(str))), 7)
    return dataset, features, graph


@pytest.fixture(scope="session")
def synthetic():
    return generate_homophily_dataset(n_users=40, n_items=60, ratings_per_user=8, friends_per_user=4, seed=3)


@pytest.fixture(scope="session")
def synthetic_split(synthetic):
    dataset = split_dataset(synthetic.ratings, 0.8, seed=11)
    graph = build_graph(synthetic.trust, dataset.n_users)
    return dataset, graph


@pytest.fixture
def tiny_log():
    rng = np.random.default_rng(5)
    users = np.repeat(np.arange(10), 10)
    items = np.tile(np.arange(10), 10)
    ratings = rng.integers(1, 6, size=100)
    return RatingLog.from_arrays(users, items, ratings, 5)


@pytest.fixture
def tiny_config():
    return TrainConfig(embedding_size=4, batch_size=8, dropout=0.0, walk_length=3, num_walks=2, seed=0,
                       max_epochs=3, patience=2)



@pytest.fixture
def relu_margin(monkeypatch):
    """
    Run a forward pass and return the smallest |pre-activation| any ReLU saw.
    """
    original = ops.relu

    def measure(forward):
        seen = []

        def recording(x):
            seen.append(float(np.min(np.abs(ops.as_tensor(x).data))))
            return original(x)

        monkeypatch.setattr(ops, "relu", recording)
        try:
            forward()
        finally:
            monkeypatch.setattr(ops, "relu", original)
        return min(seen, default=np.inf)

    return measure
