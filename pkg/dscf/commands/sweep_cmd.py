import click

from dscf import data
from dscf.commands.common import (ensure_sequences, open_run, override_config, parse_int_list, resolve_config,
                                  run_options, train_and_test)
from dscf.training.reports import write_table

MODULE_NAME = "sweep"
PARAMS = {"l": "walk_length", "H": "num_walks"}


@click.command(name="sweep")
@run_options
@click.option("--param", type=click.Choice(list(PARAMS)), required=True,
              help="Sequence length l or sequence count H.")
@click.option("--values", "values", required=True, help="Comma-separated values, e.g. 1,2,4,8.")
def command(config_file, param, values, **flags):
    """
    Train the chosen variant once per value of l or H and tabulate test MAE/RMSE.

    Missing sequence caches are built on the way.
    """
    config = resolve_config(config_file, **flags)
    store = open_run(MODULE_NAME, config)
    dataset = store.load_dataset()
    features = store.load_features()
    graph = store.load_graph(dataset.n_users, config.directed)

    rows = []
    for value in parse_int_list(values):
        run = override_config(config, **{PARAMS[param]: value})
        sequences = ensure_sequences(store, dataset, graph, features, run.walk_length, run.num_walks, run.seed)
        _, result, test = train_and_test(store, dataset, sequences, run, run.variant, tag=f"{param}{value}")
        rows.append({"param": param, "value": value, "epoch": result.best_epoch, "mae": test.mae, "rmse": test.rmse})

    table = write_table(store.path(data.SWEEP_TABLE_FILE.format(param=param)), rows)
    click.echo(table.to_string(index=False))
