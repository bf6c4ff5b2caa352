import click

from dscf.commands.common import open_run, resolve_config, run_options
from dscf.features.neumf import pretrain_neumf, svd_item_features
from dscf.schema.schemas import FeatureSourceEnum
from dscf.utils.logger import log

MODULE_NAME = "pretrain"


@click.command(name="pretrain")
@run_options
def command(config_file, **flags):
    """
    Learn the item feature table used to pick relevant items (NeuMF, SVD, or the synthetic planted features).
    """
    config = resolve_config(config_file, **flags)
    store = open_run(MODULE_NAME, config)
    dataset = store.load_dataset()

    if config.feature_source == FeatureSourceEnum.NEUMF:
        features = pretrain_neumf(dataset, config.neumf_config())
    elif config.feature_source == FeatureSourceEnum.PLANTED:
        features = store.load_planted_features()
    else:
        features = svd_item_features(dataset, 2 * config.neumf_dim)
    store.save_features(features)
    log(MODULE_NAME, f"Saved {len(features)} item vectors of dimension {features.dim}")
