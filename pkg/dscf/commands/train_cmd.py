import click

from dscf.commands.common import open_run, resolve_config, run_options, train_and_test

MODULE_NAME = "train"


@click.command(name="train")
@run_options
def command(config_file, **flags):
    """
    Train one variant on the cached sequences with early stopping on validation RMSE.
    """
    config = resolve_config(config_file, **flags)
    store = open_run(MODULE_NAME, config)
    dataset = store.load_dataset()
    sequences = store.load_sequences(config.walk_length, config.num_walks, dataset, config.seed)
    graph = features = None
    if config.resample_walks:
        graph = store.load_graph(dataset.n_users, config.directed)
        features = store.load_features()
    _, _, test = train_and_test(store, dataset, sequences, config, config.variant, graph, features)
    click.echo(test.json(exclude={"config"}))
