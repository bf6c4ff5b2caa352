"""
Artifact directory shared by the commands.

Each command reads the artifacts of the earlier ones from here and writes its
own; file names come from `dscf.data`.
"""
from pathlib import Path
from typing import Optional

import numpy as np

from dscf import data
from dscf.dataset.loader import TrustNetwork
from dscf.dataset.split import RatingDataset, write_split_manifest
from dscf.features.cache import load_sequence_store, save_sequence_store
from dscf.features.sequences import SequenceStore
from dscf.features.similarity import ItemFeatureTable
from dscf.graph.social import SocialGraph, build_graph
from dscf.schema.schemas import RunConfig, TrustLoadReport
from dscf.utils.artifact_checker import ArtifactChecker


class ArtifactStore:

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        return self.root / name

    def sequences_name(self, length: int, count: int) -> str:
        return data.SEQUENCES_FILE.format(l=length, h=count)

    def require(self, required) -> None:
        """
        Raise `MissingArtifactError` for the first absent file of a {file name: producing command} mapping.
        """
        ArtifactChecker(dict(required))(self.root)

    ####### DATASET
    def save_dataset(self, dataset: RatingDataset, trust: TrustNetwork,
                     record_rows: Optional[np.ndarray] = None) -> None:
        dataset.save(self.path(data.DATASET_FILE))
        write_split_manifest(dataset, self.path(data.SPLIT_MANIFEST_FILE), record_rows)
        np.savez_compressed(self.path(data.TRUST_FILE), sources=trust.sources, targets=trust.targets,
                            report=np.array(trust.report.json()))

    def load_dataset(self) -> RatingDataset:
        self.require({data.DATASET_FILE: "prepare"})
        return RatingDataset.load(self.path(data.DATASET_FILE))

    def load_trust(self) -> TrustNetwork:
        self.require({data.TRUST_FILE: "prepare"})
        with np.load(self.path(data.TRUST_FILE), allow_pickle=False) as archive:
            return TrustNetwork(sources=archive["sources"], targets=archive["targets"],
                                report=TrustLoadReport.parse_raw(str(archive["report"])))

    def load_graph(self, n_users: int, directed: bool = False) -> SocialGraph:
        return build_graph(self.load_trust(), n_users, directed)

    ####### FEATURES
    def save_features(self, features: ItemFeatureTable) -> None:
        features.save(self.path(data.FEATURES_FILE))

    def load_features(self) -> ItemFeatureTable:
        self.require({data.FEATURES_FILE: "pretrain"})
        return ItemFeatureTable.load(self.path(data.FEATURES_FILE))

    def save_planted_features(self, features: ItemFeatureTable) -> None:
        features.save(self.path(data.PLANTED_FEATURES_FILE))

    def load_planted_features(self) -> ItemFeatureTable:
        self.require({data.PLANTED_FEATURES_FILE: "prepare --dataset synthetic"})
        return ItemFeatureTable.load(self.path(data.PLANTED_FEATURES_FILE))

    ####### SEQUENCES
    def save_sequences(self, sequences: SequenceStore, dataset: RatingDataset) -> Path:
        path = self.path(self.sequences_name(sequences.length, sequences.count))
        save_sequence_store(path, sequences, dataset.fingerprint())
        return path

    def load_sequences(self, length: int, count: int, dataset: RatingDataset,
                       seed: Optional[int] = None) -> SequenceStore:
        name = self.sequences_name(length, count)
        self.require({name: "walks"})
        return load_sequence_store(self.path(name), dataset.fingerprint(), seed)

    ####### RUN CONFIG
    def write_run_config(self, config: RunConfig) -> Path:
        path = self.path(data.RUN_CONFIG_FILE)
        path.write_text(config.to_env(), encoding="utf-8")
        return path
