import click
import pandas as pd

from dscf import data
from dscf.commands.common import open_run, parse_int_list, resolve_config, run_options, seeded_config, train_and_test
from dscf.schema.schemas import VariantKind
from dscf.training.reports import write_table
from dscf.utils.logger import log

MODULE_NAME = "ablate"


@click.command(name="ablate")
@run_options
@click.option("--seeds", default="0", help="Comma-separated model seeds, e.g. 0,1,2.")
def command(config_file, seeds, **flags):
    """
    Train the full model and its five ablations for every seed and tabulate test MAE/RMSE.
    """
    config = resolve_config(config_file, **flags)
    store = open_run(MODULE_NAME, config)
    dataset = store.load_dataset()
    sequences = store.load_sequences(config.walk_length, config.num_walks, dataset, config.seed)

    rows = []
    for seed in parse_int_list(seeds):
        for variant in VariantKind:
            _, result, test = train_and_test(store, dataset, sequences, seeded_config(config, seed), variant,
                                            tag=f"seed{seed}")
            rows.append({"variant": variant.value, "seed": seed, "epoch": result.best_epoch,
                         "mae": test.mae, "rmse": test.rmse})

    table = write_table(store.path(data.ABLATION_TABLE_FILE), rows)
    means = table.groupby("variant", sort=False)[["mae", "rmse"]].mean()
    log(MODULE_NAME, f"Mean test metrics per variant:\n{means.to_string()}")
    with pd.option_context("display.float_format", "{:.4f}".format):
        click.echo(table.to_string(index=False))
