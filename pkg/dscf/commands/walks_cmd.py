import click

from dscf import data
from dscf.commands.common import open_run, resolve_config, run_options
from dscf.features.sequences import audit_leakage, build_sequence_store
from dscf.graph.walks import Node2VecPolicy, UniformPolicy, dump_walk_corpus, random_walk
from dscf.utils.logger import log
from dscf.utils.rng import make_rng

MODULE_NAME = "walks"


@click.command(name="walks")
@run_options
@click.option("--p", "return_p", type=float, default=None, help="Node2Vec return parameter; uniform walks when unset.")
@click.option("--q", "inout_q", type=float, default=None, help="Node2Vec in-out parameter; uniform walks when unset.")
@click.option("--dump-corpus/--no-dump-corpus", default=False, help="Also write H plain user walks per user.")
def command(config_file, return_p, inout_q, dump_corpus, **flags):
    """
    Build and cache the item-aware sequences of every rated pair.
    """
    config = resolve_config(config_file, **flags)
    store = open_run(MODULE_NAME, config)
    dataset = store.load_dataset()
    features = store.load_features()
    graph = store.load_graph(dataset.n_users, config.directed)
    if return_p is None and inout_q is None:
        policy = UniformPolicy()
    else:
        policy = Node2VecPolicy(return_p or 1.0, inout_q or 1.0)

    sequences = build_sequence_store(dataset.users, dataset.items, graph, dataset, features,
                                     config.walk_length, config.num_walks, config.seed, policy)
    violations = audit_leakage(sequences, dataset)
    path = store.save_sequences(sequences, dataset)
    log(MODULE_NAME, f"Cached {len(sequences)} pairs in {path}; leakage audit: {violations} violations")

    if dump_corpus:
        rngs = [make_rng(config.seed, user) for user in range(graph.n_users)]
        walks = (random_walk(graph, user, config.walk_length, rngs[user], policy)
                 for user in range(graph.n_users) for _ in range(config.num_walks))
        corpus = store.path(data.WALK_CORPUS_FILE.format(l=config.walk_length))
        dump_walk_corpus(corpus, walks, config.seed, config.walk_length)
        log(MODULE_NAME, f"Wrote walk corpus {corpus}")
