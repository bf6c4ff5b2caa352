"""
Options, config resolution and pipeline steps shared by the commands.
"""
from pathlib import Path
from typing import Optional, Tuple

import click
from dotenv import dotenv_values
from pydantic import ValidationError as PydanticValidationError

from dscf import data
from dscf.config import RunEnvironment, settings
from dscf.dataset.split import RatingDataset
from dscf.exceptions import ConfigurationError, StateError
from dscf.features.sequences import SequenceStore, audit_leakage, build_sequence_store
from dscf.features.similarity import ItemFeatureTable
from dscf.graph.social import SocialGraph
from dscf.model.dscf import DSCF, save_model
from dscf.model.variants import make_variant
from dscf.nn.tensor import set_default_dtype
from dscf.schema.schemas import FeatureSourceEnum, MetricReport, RunConfig, VariantKind
from dscf.store import ArtifactStore
from dscf.training.reports import write_summary
from dscf.training.trainer import TrainResult, Trainer, evaluate
from dscf.utils.logger import log, setup_logging

MODULE_NAME = "cli"

RUN_OPTIONS = [
    click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), default=None,
                 help="Flat key=value file with RunConfig keys, e.g. a previous run.env."),
    click.option("--dataset", default=None, help="Dataset name; 'synthetic' generates the homophily dataset."),
    click.option("--ratings", default=None, help="Rating file (user, item, rating)."),
    click.option("--trust", default=None, help="Trust file (user, friend)."),
    click.option("--out", default=None, help="Artifact directory."),
    click.option("--split", type=float, default=None, help="Train fraction x; val and test get (1 - x) / 2 each."),
    click.option("--seed", type=int, default=None),
    click.option("--directed/--undirected", default=None, help="Walk trust edges one way only."),
    click.option("--variant", type=click.Choice([k.value for k in VariantKind]), default=None),
    click.option("--feature-source", type=click.Choice([s.value for s in FeatureSourceEnum]), default=None),
    click.option("--neumf-dim", type=int, default=None),
    click.option("--neumf-epochs", type=int, default=None),
    click.option("--d", type=int, default=None, help="Embedding size."),
    click.option("--batch", type=int, default=None),
    click.option("--lr", type=float, default=None),
    click.option("--dropout", type=float, default=None),
    click.option("--walk-length", type=int, default=None, help="Sequence length l."),
    click.option("--num-walks", type=int, default=None, help="Sequences per pair H."),
    click.option("--max-epochs", type=int, default=None),
    click.option("--patience", type=int, default=None),
    click.option("--mask-padding/--no-mask-padding", default=None),
    click.option("--resample-walks/--no-resample-walks", default=None),
    click.option("--float-dtype", type=click.Choice(["float64", "float32"]), default=None),
]


def run_options(func):
    for option in reversed(RUN_OPTIONS):
        func = option(func)
    return func


def _invalid(error: PydanticValidationError, source: str) -> ConfigurationError:
    reasons = "; ".join(f"{'.'.join(str(part) for part in e['loc'])}: {e['msg']}" for e in error.errors())
    return ConfigurationError(f"invalid {source}: {reasons}")


def resolve_config(config_file: Optional[str] = None, **flags) -> RunConfig:
    """
    Merge defaults, DSCF_* environment, the config file and CLI flags, later sources winning.

    Raises:
        ConfigurationError: Unknown config-file key or an invalid value.
    """
    values = {"out": settings.artifact_dir, "seed": settings.default_seed, "n_levels": settings.n_levels,
              "float_dtype": settings.float_dtype}
    try:
        values.update(RunEnvironment().dict(exclude_unset=True))
    except PydanticValidationError as error:
        raise _invalid(error, "DSCF_* environment") from None
    if config_file:
        from_file = {k.lower(): v for k, v in dotenv_values(config_file).items() if v is not None}
        unknown = sorted(set(from_file) - set(RunConfig.__fields__))
        if unknown:
            raise ConfigurationError(f"{config_file}: unknown config keys {', '.join(unknown)}")
        values.update(from_file)
    values.update({key: value for key, value in flags.items() if value is not None})
    try:
        return RunConfig(**values)
    except PydanticValidationError as error:
        raise _invalid(error, "run config") from None


def open_run(command: str, config: RunConfig) -> ArtifactStore:
    """
    Prepare the artifact directory and logging of a command, then log and persist its resolved config.
    """
    store = ArtifactStore(config.out)
    setup_logging(str(store.path(Path(settings.log_file).name)))
    set_default_dtype(config.float_dtype)
    log(MODULE_NAME, f"{command}: {data.MESSAGE_RUN_CONFIG} {config.json()}")
    store.write_run_config(config)
    return store


def parse_int_list(text: str) -> Tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ConfigurationError(f"expected a comma-separated list of integers, got {text!r}") from None
    if not values:
        raise ConfigurationError("the value list is empty")
    return values


def ensure_sequences(store: ArtifactStore, dataset: RatingDataset, graph: SocialGraph, features: ItemFeatureTable,
                     length: int, count: int, seed: int) -> SequenceStore:
    """
    Sequences of every rated pair for (l, H), read from the cache or built and cached.

    A cache built from another dataset or walk seed is rebuilt.
    """
    name = store.sequences_name(length, count)
    if store.path(name).exists():
        try:
            return store.load_sequences(length, count, dataset, seed)
        except StateError as error:
            log(MODULE_NAME, f"Rebuilding stale cache: {error}")
    sequences = build_sequence_store(dataset.users, dataset.items, graph, dataset, features, length, count, seed)
    violations = audit_leakage(sequences, dataset)
    log(MODULE_NAME, f"Leakage audit of {name}: {violations} violations")
    store.save_sequences(sequences, dataset)
    return sequences


def train_and_test(store: ArtifactStore, dataset: RatingDataset, sequences: SequenceStore, config: RunConfig,
                   variant: VariantKind, graph: Optional[SocialGraph] = None,
                   features: Optional[ItemFeatureTable] = None,
                   tag: Optional[str] = None) -> Tuple[DSCF, TrainResult, MetricReport]:
    """
    Train one variant, store its best checkpoint, metrics and summary, and report it on the test partition.

    A tag (e.g. `seed1` or `l4`) is appended to the variant in the artifact names so study runs do not
    overwrite each other.
    """
    name = variant.value if tag is None else f"{variant.value}_{tag}"
    train_config = config.train_config().copy(update={"walk_length": sequences.length,
                                                      "num_walks": sequences.count})
    model = DSCF(dataset.n_users, dataset.n_items, dataset.n_levels, train_config, make_variant(variant),
                 rating_offset=dataset.train_mean)
    metrics_path = store.path(data.METRICS_FILE.format(variant=name))
    metrics_path.unlink(missing_ok=True)
    trainer = Trainer(model, dataset, sequences, train_config, graph, features, report_path=metrics_path)
    result = trainer.fit()
    save_model(store.path(data.CHECKPOINT_FILE.format(variant=name)), model,
               {"best_epoch": str(result.best_epoch), "dataset_hash": dataset.fingerprint().hex()})
    test = evaluate(model, dataset, trainer.sequences, data.TEST).copy(update={"epoch": result.best_epoch})
    write_summary(store.path(data.SUMMARY_FILE.format(variant=name)), test, result.best_report,
                  {"stopped_early": str(result.stopped_early)})
    log(MODULE_NAME, f"{name}: test MAE {test.mae:.4f} RMSE {test.rmse:.4f} (best epoch {result.best_epoch})")
    return model, result, test


def seeded_config(config: RunConfig, seed: int) -> RunConfig:
    return override_config(config, seed=int(seed))


def override_config(config: RunConfig, **changes) -> RunConfig:
    """
    Copy of a resolved config with some fields replaced, validated like the original.
    """
    try:
        return RunConfig(**{**config.dict(), **changes})
    except PydanticValidationError as error:
        raise _invalid(error, "run config") from None
