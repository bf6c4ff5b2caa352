"""
Rating-matrix-only baselines: PMF (with a validation grid search) and NeuMF.
"""
from itertools import product
from typing import List, Sequence, Tuple

import numpy as np

from dscf import data
from dscf.dataset.split import RatingDataset
from dscf.exceptions import DomainError
from dscf.features.neumf import train_neumf
from dscf.schema.schemas import MetricReport, NeuMFConfig, PMFConfig
from dscf.training.metrics import clamp_ratings, error_metrics
from dscf.training.pairwise import PairModel, fit_pair_model, predict_pairs
from dscf.training.pmf import PMF
from dscf.utils.logger import log

MODULE_NAME = "baseline"

DEFAULT_RANKS = (5, 10, 20)
DEFAULT_REGS = (0.01, 0.05, 0.1, 0.5)


def evaluate_pair_model(model: PairModel, dataset: RatingDataset, split: str, variant: str) -> MetricReport:
    users, items, ratings = dataset.pairs(split)
    if not len(ratings):
        raise DomainError(f"{split} partition is empty")
    predictions = clamp_ratings(predict_pairs(model, users, items), dataset.n_levels)
    mae, rmse = error_metrics(predictions, ratings)
    return MetricReport(mae=mae, rmse=rmse, split=split, variant=variant)


def fit_pmf(dataset: RatingDataset, config: PMFConfig) -> Tuple[PMF, List[float]]:
    rng = np.random.default_rng(config.seed)
    model = PMF(dataset.n_users, dataset.n_items, config.rank, config.reg, rng, dataset.train_mean)
    history = fit_pair_model(model, dataset, config.epochs, config.batch_size, config.learning_rate,
                             config.seed, MODULE_NAME)
    return model, history


def train_pmf_baseline(dataset: RatingDataset, config: PMFConfig, split: str = data.TEST) -> MetricReport:
    """
    Fit PMF on the train partition and report MAE/RMSE on `split`.

    Raises:
        DomainError: The train partition or `split` is empty.
        TrainingError: The loss diverges.
    """
    model, history = fit_pmf(dataset, config)
    report = evaluate_pair_model(model, dataset, split, "pmf").copy(
        update={"epoch": config.epochs, "train_loss": history[-1]})
    log(MODULE_NAME, f"PMF rank {config.rank} reg {config.reg}: {split} MAE {report.mae:.4f} RMSE {report.rmse:.4f}")
    return report


def grid_search_pmf(dataset: RatingDataset, base: PMFConfig, ranks: Sequence[int] = DEFAULT_RANKS,
                    regs: Sequence[float] = DEFAULT_REGS) -> Tuple[PMFConfig, List[Tuple[PMFConfig, MetricReport]]]:
    """
    Pick the rank and regularization weight with the lowest validation RMSE.

    Returns:
        Tuple: The winning config and every (config, validation report) tried.
    """
    trials = []
    for rank, reg in product(ranks, regs):
        config = base.copy(update={"rank": rank, "reg": reg})
        trials.append((config, train_pmf_baseline(dataset, config, data.VAL)))
    best = min(trials, key=lambda trial: trial[1].rmse)[0]
    log(MODULE_NAME, f"PMF grid search picked rank {best.rank} reg {best.reg}")
    return best, trials


def neumf_baseline(dataset: RatingDataset, config: NeuMFConfig, split: str = data.TEST) -> MetricReport:
    model, history = train_neumf(dataset, config)
    report = evaluate_pair_model(model, dataset, split, "neumf").copy(
        update={"epoch": config.epochs, "train_loss": history[-1]})
    log(MODULE_NAME, f"NeuMF: {split} MAE {report.mae:.4f} RMSE {report.rmse:.4f}")
    return report
