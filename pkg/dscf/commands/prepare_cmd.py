import click

from dscf.commands.common import open_run, resolve_config, run_options
from dscf.dataset.loader import IngestFormat, load_ratings, load_trust
from dscf.dataset.split import split_dataset
from dscf.dataset.synthetic import generate_homophily_dataset
from dscf.exceptions import ConfigurationError
from dscf.features.similarity import ItemFeatureTable
from dscf.utils.logger import log

MODULE_NAME = "prepare"
SYNTHETIC = "synthetic"


@click.command(name="prepare")
@run_options
@click.option("--format", "fmt", type=click.Choice([f.value for f in IngestFormat]), default=IngestFormat.TSV.value,
              help="Format of the rating and trust files.")
def command(config_file, fmt, **flags):
    """
    Load ratings and trust, remap ids and write the train/val/test split.

    With `--dataset synthetic` the planted-homophily dataset is generated
    from `--seed` instead of reading files, together with its planted item
    features for `pretrain --feature-source planted`.
    """
    config = resolve_config(config_file, **flags)
    store = open_run(MODULE_NAME, config)

    if config.dataset == SYNTHETIC:
        synthetic = generate_homophily_dataset(n_levels=config.n_levels, seed=config.seed)
        ratings, trust = synthetic.ratings, synthetic.trust
        store.save_planted_features(ItemFeatureTable(synthetic.item_features))
    else:
        if not config.ratings or not config.trust:
            raise ConfigurationError("prepare needs --ratings and --trust unless --dataset synthetic")
        ratings = load_ratings(config.ratings, IngestFormat(fmt), config.n_levels)
        trust = load_trust(config.trust, ratings.user_ids, IngestFormat(fmt))

    dataset = split_dataset(ratings, config.split, config.seed)
    store.save_dataset(dataset, trust, ratings.record_rows)
    statistics = dataset.statistics(len(trust))
    log(MODULE_NAME, f"Dataset statistics: {statistics.json()}")
    click.echo(statistics.json())
