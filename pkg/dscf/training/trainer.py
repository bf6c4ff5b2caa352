"""
Minibatch training of the DSCF network with validation-driven early stopping.
"""
import math
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
from tqdm import tqdm

from dscf import data
from dscf.config import settings
from dscf.dataset.split import RatingDataset
from dscf.exceptions import DomainError, TrainingError
from dscf.features.sequences import SequenceStore, build_sequence_store
from dscf.features.similarity import ItemFeatureTable
from dscf.graph.social import SocialGraph
from dscf.graph.walks import DEFAULT_POLICY, TransitionPolicy
from dscf.model.dscf import DSCF
from dscf.nn.optim import Adam
from dscf.schema.schemas import MetricReport, TrainConfig
from dscf.training.metrics import error_metrics, squared_loss
from dscf.training.reports import append_report
from dscf.utils.logger import log

MODULE_NAME = "trainer"
EVAL_BATCH_SIZE = 256


class EarlyStopping:
    """
    Stops once the monitored value has risen for `patience` successive epochs
    and remembers the epoch with the lowest value.
    """

    def __init__(self, patience: int):
        self.patience = patience
        self.best = math.inf
        self.best_epoch = 0
        self.previous: Optional[float] = None
        self.rises = 0

    def update(self, epoch: int, value: float) -> bool:
        """
        Record the value of `epoch`.

        Returns:
            bool: True when training should stop.
        """
        if value < self.best:
            self.best = value
            self.best_epoch = epoch
        if self.previous is not None and value > self.previous:
            self.rises += 1
        else:
            self.rises = 0
        self.previous = value
        return self.rises >= self.patience


def evaluate(model: DSCF, dataset: RatingDataset, sequences: SequenceStore, split: str,
             batch_size: int = EVAL_BATCH_SIZE) -> MetricReport:
    """
    MAE and RMSE of clamped predictions over one partition.

    Raises:
        DomainError: The partition is empty.
        MissingSequenceError: A pair of the partition has no cached sequences.
    """
    users, items, ratings = dataset.pairs(split)
    if not len(ratings):
        raise DomainError(f"{split} partition is empty")
    predictions = np.concatenate([
        model.predict_ratings(users[s:s + batch_size], items[s:s + batch_size],
                              sequences.get(users[s:s + batch_size], items[s:s + batch_size]))
        for s in range(0, len(ratings), batch_size)
    ])
    mae, rmse = error_metrics(predictions, ratings)
    return MetricReport(mae=mae, rmse=rmse, split=split, variant=model.variant.kind.value, config=model.config)


class TrainResult:

    def __init__(self, best_state: Dict[str, np.ndarray], best_epoch: int, reports: List[MetricReport],
                 losses: List[float], stopped_early: bool):
        self.best_state = best_state
        self.best_epoch = best_epoch
        self.reports = reports
        self.losses = losses
        self.stopped_early = stopped_early

    @property
    def best_report(self) -> MetricReport:
        return next(r for r in self.reports if r.epoch == self.best_epoch)


class Trainer:
    """
    Runs epochs of shuffled minibatches with Adam on the halved squared error.

    After each epoch the validation RMSE is measured; the parameters of the
    best epoch are restored when training ends.

    Args:
        model: Network to train in place.
        dataset: Dataset with train and validation partitions.
        sequences: Cached sequences of every train and validation pair.
        config: Batch size, learning rate, epochs, patience and walk settings.
        graph: Social graph, needed only to resample train walks every epoch.
        features: Item features, needed only to resample train walks every epoch.
        report_path: JSON-lines file receiving one validation record per epoch.
    """

    def __init__(self, model: DSCF, dataset: RatingDataset, sequences: SequenceStore, config: TrainConfig,
                 graph: Optional[SocialGraph] = None, features: Optional[ItemFeatureTable] = None,
                 policy: TransitionPolicy = DEFAULT_POLICY, report_path=None):
        if config.resample_walks and (graph is None or features is None):
            raise DomainError("resampling walks needs the social graph and the item features")
        self.model = model
        self.dataset = dataset
        self.sequences = sequences
        self.config = config
        self.graph = graph
        self.features = features
        self.policy = policy
        self.report_path = Path(report_path) if report_path else None
        self.optimizer = Adam(model.parameters(), learning_rate=config.learning_rate)
        self.rng = np.random.default_rng(config.seed)
        self.walk_seed = sequences.seed

    def _resample(self, epoch: int, users: np.ndarray, items: np.ndarray) -> None:
        fresh = build_sequence_store(users, items, self.graph, self.dataset, self.features,
                                     self.sequences.length, self.sequences.count,
                                     self.walk_seed + epoch, self.policy)
        self.sequences = self.sequences.merge(fresh)

    def train_epoch(self, epoch: int) -> float:
        users, items, ratings = self.dataset.pairs(data.TRAIN)
        if self.config.resample_walks and epoch > 1:
            self._resample(epoch, users, items)
        self.model.train()
        order = self.rng.permutation(len(ratings))
        total = 0.0
        for batch, start in enumerate(range(0, len(order), self.config.batch_size)):
            index = order[start:start + self.config.batch_size]
            steps = self.sequences.get(users[index], items[index])
            loss = squared_loss(self.model(users[index], items[index], steps), ratings[index])
            if not np.isfinite(loss.item()):
                raise TrainingError(data.MESSAGE_NON_FINITE_LOSS.format(epoch=epoch, batch=batch))
            loss.backward()
            self.optimizer.step()
            total += loss.item() * len(index)
        return total / len(ratings)

    def fit(self) -> TrainResult:
        """
        Train until the validation RMSE has risen for `patience` successive epochs or `max_epochs` is reached.

        Raises:
            DomainError: The train or validation partition is empty.
            TrainingError: The loss or a gradient becomes non-finite.
            MissingSequenceError: A train or validation pair has no cached sequences.

        Returns:
            TrainResult: Best-validation parameters, per-epoch reports and losses.
        """
        if not len(self.dataset.partition(data.TRAIN)):
            raise DomainError("train partition is empty")
        stopping = EarlyStopping(self.config.patience)
        reports, losses = [], []
        best_state = self.model.state_dict()
        stopped = False

        progress = tqdm(range(1, self.config.max_epochs + 1), desc=MODULE_NAME,
                        disable=not settings.progress, leave=False)
        for epoch in progress:
            loss = self.train_epoch(epoch)
            losses.append(loss)
            report = evaluate(self.model, self.dataset, self.sequences, data.VAL).copy(
                update={"epoch": epoch, "train_loss": loss})
            reports.append(report)
            if self.report_path:
                append_report(self.report_path, report)
            log(MODULE_NAME, f"epoch {epoch}: loss {loss:.6f} val MAE {report.mae:.4f} RMSE {report.rmse:.4f}")

            stop = stopping.update(epoch, report.rmse)
            if stopping.best_epoch == epoch:
                best_state = self.model.state_dict()
            if stop:
                log(MODULE_NAME, data.MESSAGE_EARLY_STOP.format(patience=self.config.patience, epoch=epoch))
                stopped = True
                break

        self.model.load_state_dict(best_state)
        return TrainResult(best_state, stopping.best_epoch, reports, losses, stopped)
