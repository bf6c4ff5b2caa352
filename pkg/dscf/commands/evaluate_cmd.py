import json

import click
import numpy as np

from dscf import data
from dscf.commands.common import open_run, resolve_config, run_options
from dscf.model.dscf import load_model
from dscf.training.trainer import evaluate
from dscf.utils.logger import log

MODULE_NAME = "evaluate"


@click.command(name="evaluate")
@run_options
@click.option("--on", "partition", type=click.Choice(list(data.PARTITIONS)), default=data.TEST,
              help="Partition to evaluate.")
@click.option("--show-attention", type=int, default=0,
              help="Print step and sequence attention weights of the first N pairs of the partition.")
def command(config_file, partition, show_attention, **flags):
    """
    Report MAE and RMSE of a trained checkpoint on one partition.
    """
    config = resolve_config(config_file, **flags)
    store = open_run(MODULE_NAME, config)
    checkpoint = data.CHECKPOINT_FILE.format(variant=config.variant.value)
    store.require({checkpoint: "train"})
    dataset = store.load_dataset()
    model, meta = load_model(store.path(checkpoint))
    sequences = store.load_sequences(model.config.walk_length, model.config.num_walks, dataset, model.config.seed)

    report = evaluate(model, dataset, sequences, partition).copy(update={"epoch": int(meta.get("best_epoch", 0))})
    log(MODULE_NAME, f"{config.variant.value} on {partition}: MAE {report.mae:.4f} RMSE {report.rmse:.4f}")
    click.echo(report.json(exclude={"config"}))

    if show_attention:
        users, items, _ = dataset.pairs(partition)
        users, items = users[:show_attention], items[:show_attention]
        alpha, beta = model.attention_weights(users, items, sequences.get(users, items))
        for row, (user, item) in enumerate(zip(users.tolist(), items.tolist())):
            click.echo(json.dumps({
                "user": str(dataset.user_ids[user]),
                "item": str(dataset.item_ids[item]),
                "beta": np.round(beta[row], 6).tolist(),
                "alpha": np.round(alpha[row], 6).tolist(),
            }))
