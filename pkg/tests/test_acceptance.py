"""
Seed-repeated experiments on the planted-homophily dataset. Slow; run with `pytest -m slow`.
"""
import numpy as np
import pytest

from dscf import data
from dscf.dataset.split import split_dataset
from dscf.dataset.synthetic import generate_homophily_dataset
from dscf.features.sequences import build_sequence_store
from dscf.features.similarity import ItemFeatureTable
from dscf.graph.social import build_graph
from dscf.model.dscf import DSCF
from dscf.model.variants import make_variant
from dscf.schema.schemas import TrainConfig, VariantKind
from dscf.training.trainer import Trainer, evaluate

pytestmark = pytest.mark.slow

SEEDS = range(10)
LENGTHS = (1, 2, 4, 8)


def homophily_run(seed):
    synthetic = generate_homophily_dataset(n_users=200, n_items=300, seed=seed)
    dataset = split_dataset(synthetic.ratings, 0.8, seed=seed)
    graph = build_graph(synthetic.trust, dataset.n_users)
    return dataset, graph, ItemFeatureTable(synthetic.item_features)


def held_out_rmse(dataset, sequences, config, kind=VariantKind.FULL):
    model = DSCF(dataset.n_users, dataset.n_items, dataset.n_levels, config, make_variant(kind),
                 rating_offset=dataset.train_mean)
    Trainer(model, dataset, sequences, config).fit()
    return evaluate(model, dataset, sequences, data.TEST).rmse


def train_config(seed, walk_length=4):
    return TrainConfig(embedding_size=16, batch_size=64, learning_rate=0.01, dropout=0.1,
                       walk_length=walk_length, num_walks=4, seed=seed, max_epochs=60, patience=5)


def test_opinions_and_items_both_help():
    ordered = 0
    for seed in SEEDS:
        dataset, graph, features = homophily_run(seed)
        config = train_config(seed)
        sequences = build_sequence_store(dataset.users, dataset.items, graph, dataset, features,
                                         config.walk_length, config.num_walks, seed)
        full = held_out_rmse(dataset, sequences, config)
        no_opinion = held_out_rmse(dataset, sequences, config, VariantKind.NO_OPINION)
        no_item_opinion = held_out_rmse(dataset, sequences, config, VariantKind.NO_ITEM_OPINION)
        ordered += full < no_opinion < no_item_opinion
    assert ordered >= 8


def test_sequence_length_has_an_interior_optimum():
    interior = 0
    for seed in SEEDS:
        dataset, graph, features = homophily_run(seed)
        curve = []
        for length in LENGTHS:
            config = train_config(seed, length)
            sequences = build_sequence_store(dataset.users, dataset.items, graph, dataset, features,
                                             length, config.num_walks, seed)
            curve.append(held_out_rmse(dataset, sequences, config))
        interior += 0 < int(np.argmin(curve)) < len(LENGTHS) - 1
    assert interior >= 7
