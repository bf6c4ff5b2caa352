from enum import Enum
from typing import Dict, List, Optional, Tuple
from pydantic import BaseModel, Field, root_validator, validator

####### DATA SCHEMAS
#######################################

class RatingTriple(BaseModel):
    """
    One observed rating: dense user id, dense item id and integer rating level.
    """
    user: int = Field(ge=0)
    item: int = Field(ge=0)
    rating: int = Field(ge=1)

    class Config:
        frozen = True

class TrustEdge(BaseModel):
    """
    A declared trust relation between two dense user ids.
    """
    source: int = Field(ge=0)
    target: int = Field(ge=0)

    @root_validator(skip_on_failure=True)
    def no_self_loop(cls, values):
        if values["source"] == values["target"]:
            raise ValueError("trust edge endpoints must differ")
        return values

    class Config:
        frozen = True

class TrustLoadReport(BaseModel):
    """
    Counters collected while ingesting a trust file.
    """
    raw_edges: int
    kept_edges: int
    dropped_unknown: int
    dropped_self_loops: int
    dropped_duplicates: int

class DatasetStatistics(BaseModel):
    """
    Size and density figures of a rating dataset and its social network.
    """
    n_users: int
    n_items: int
    n_ratings: int
    rating_density: float
    n_social_connections: int = 0
    social_density: float = 0.0
    partition_sizes: Dict[str, int] = {}

####### GRAPH SCHEMAS
#######################################

class DegreeStatistics(BaseModel):
    """
    Degree summary of a social graph.
    """
    min_degree: int
    max_degree: int
    mean_degree: float
    isolated_users: int

class UserSequence(BaseModel):
    """
    A random-walk user sequence rooted at `root`; the root itself is not a step.

    `padded_from` is the first padded position when the walk stalled on a user
    without neighbors, otherwise None.
    """
    root: int
    steps: Tuple[int, ...]
    padded: bool = False
    padded_from: Optional[int] = None

####### FEATURE SCHEMAS
#######################################

class FeatureSourceEnum(str, Enum):
    """
    Where item feature vectors come from: NeuMF item embeddings, a truncated SVD, or
    the planted features of the synthetic dataset.
    """
    NEUMF = "neumf"
    SVD = "svd"
    PLANTED = "planted"

class NeuMFConfig(BaseModel):
    """
    Hyper-parameters of the NeuMF pretraining / baseline model.
    """
    embedding_size: int = Field(8, gt=0)
    epochs: int = Field(20, gt=0)
    batch_size: int = Field(256, gt=0)
    learning_rate: float = Field(0.005, gt=0)
    seed: int = Field(0, ge=0)

class ItemAwareSequence(BaseModel):
    """
    Item-aware social sequence for a target pair: (neighbor, item, rating) steps.

    Padding steps use the reserved ids (n_users, n_items, 0).
    """
    target_user: int
    target_item: int
    steps: List[Tuple[int, int, int]]
    padded: bool = False

####### CHECKPOINT SCHEMAS
#######################################

class ParameterEntry(BaseModel):
    """
    Name and shape of one stored parameter array.
    """
    name: str
    shape: List[int]

class CheckpointManifest(BaseModel):
    """
    Header of a checkpoint: format version, parameters in storage order, free-form metadata.
    """
    format_version: int
    parameters: List[ParameterEntry]
    metadata: Dict[str, str] = {}

####### TRAINING SCHEMAS
#######################################

class VariantKind(str, Enum):
    """
    The full model and its ablation variants.
    """
    FULL = "full"
    NO_OPINION = "no_opinion"
    NO_ITEM_OPINION = "no_item_opinion"
    NO_ATTENTION = "no_attention"
    AVERAGING = "averaging"
    SHUFFLING = "shuffling"

class TrainConfig(BaseModel):
    """
    Hyper-parameters of one DSCF training run.
    """
    embedding_size: int = Field(16, gt=0)
    batch_size: int = Field(64, gt=0)
    learning_rate: float = Field(0.001, gt=0)
    dropout: float = 0.5
    walk_length: int = Field(4, gt=0)
    num_walks: int = Field(4, gt=0)
    seed: int = Field(0, ge=0)
    max_epochs: int = Field(100, gt=0)
    patience: int = Field(5, ge=1)
    mask_padding: bool = False
    resample_walks: bool = False
    float_dtype: str = "float64"

    @validator("dropout")
    def check_dropout(cls, value):
        if not 0.0 <= value < 1.0:
            raise ValueError("dropout rate must be in [0, 1)")
        return value


class MetricReport(BaseModel):
    """
    MAE/RMSE of one evaluation pass plus the run metadata it came from.
    """
    mae: float = Field(ge=0)
    rmse: float = Field(ge=0)
    split: str
    epoch: int = 0
    train_loss: Optional[float] = None
    variant: Optional[str] = None
    config: Optional[TrainConfig] = None

    @root_validator(skip_on_failure=True)
    def mae_not_above_rmse(cls, values):
        if values["mae"] > values["rmse"] + 1e-12:
            raise ValueError("MAE cannot exceed RMSE")
        return values

class PMFConfig(BaseModel):
    """
    Hyper-parameters of the PMF baseline.
    """
    rank: int = Field(10, gt=0)
    reg: float = Field(0.05, ge=0)
    learning_rate: float = Field(0.01, gt=0)
    epochs: int = Field(50, gt=0)
    batch_size: int = Field(256, gt=0)
    seed: int = 0

####### RUN SCHEMAS
#######################################

class RunConfig(BaseModel):
    """
    Everything needed to reproduce a command invocation, as flat scalar fields.
    """
    dataset: str = "ciao"
    ratings: Optional[str] = None
    trust: Optional[str] = None
    out: str = "artifacts"
    split: float = 0.8
    seed: int = Field(0, ge=0)
    directed: bool = False
    n_levels: int = Field(5, gt=0)
    variant: VariantKind = VariantKind.FULL

    feature_source: FeatureSourceEnum = FeatureSourceEnum.NEUMF
    neumf_dim: int = Field(8, gt=0)
    neumf_epochs: int = Field(20, gt=0)

    d: int = Field(16, gt=0)
    batch: int = Field(64, gt=0)
    lr: float = Field(0.001, gt=0)
    dropout: float = 0.5
    walk_length: int = Field(4, gt=0)
    num_walks: int = Field(4, gt=0)
    max_epochs: int = Field(100, gt=0)
    patience: int = Field(5, ge=1)
    mask_padding: bool = False
    resample_walks: bool = False
    float_dtype: str = "float64"

    @validator("split")
    def check_split(cls, value):
        if not 0.0 < value < 1.0:
            raise ValueError("split fraction must be in (0, 1)")
        return value

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            embedding_size=self.d,
            batch_size=self.batch,
            learning_rate=self.lr,
            dropout=self.dropout,
            walk_length=self.walk_length,
            num_walks=self.num_walks,
            seed=self.seed,
            max_epochs=self.max_epochs,
            patience=self.patience,
            mask_padding=self.mask_padding,
            resample_walks=self.resample_walks,
            float_dtype=self.float_dtype,
        )

    def neumf_config(self) -> NeuMFConfig:
        return NeuMFConfig(embedding_size=self.neumf_dim, epochs=self.neumf_epochs, seed=self.seed)

    def to_env(self) -> str:
        """
        Render the config as flat key=value lines, readable back through `--config`.
        """
        lines = []
        for key, value in self.dict().items():
            if value is None:
                continue
            if isinstance(value, Enum):
                value = value.value
            lines.append(f"{key}={value}")
        return "\n".join(lines) + "\n"

    class Config:
        use_enum_values = False
